#include "tamelab/doubling.hpp"

#include <cmath>

#include "tamelab/errors.hpp"

namespace tamelab {

DoubledDomain build_doubled(const GridDomain& domain, const Weights& weights) {
  if (domain.boundary_set.empty()) throw NoBoundary("domain has no boundary node to glue along");
  DoubledDomain dd;
  dd.base = domain;
  GridDomain reflected = domain, absorbed = domain;
  for (int k : domain.boundary_set) {
    reflected.bc[k] = Bc::Neumann;
    absorbed.bc[k] = Bc::Dirichlet;
  }
  dd.neumann = build_generator(reflected, weights);
  dd.dirichlet = build_generator(absorbed, weights);
  const auto& nb = dd.neumann;
  const int n = nb.n();

  Vec m;
  std::vector<double> mass;
  dd.plus_copy.assign(n, -1);
  dd.minus_copy.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (nb.boundary[i]) {
      dd.seam.push_back(i);
      dd.plus_copy[i] = dd.minus_copy[i] = static_cast<int>(mass.size());
      mass.push_back(nb.m[i]);
      dd.base_of.push_back(i);
      dd.sign.push_back(0);
    } else {
      dd.plus_copy[i] = static_cast<int>(mass.size());
      mass.push_back(nb.m[i] / 2);
      dd.base_of.push_back(i);
      dd.sign.push_back(+1);
      dd.minus_copy[i] = static_cast<int>(mass.size());
      mass.push_back(nb.m[i] / 2);
      dd.base_of.push_back(i);
      dd.sign.push_back(-1);
    }
  }
  m = Eigen::Map<Vec>(mass.data(), static_cast<Eigen::Index>(mass.size()));

  std::vector<Edge> edges;
  for (const auto& e : nb.edges) {
    const bool sa = nb.boundary[e.a], sb = nb.boundary[e.b];
    if (sa && sb) {
      edges.push_back({dd.plus_copy[e.a], dd.plus_copy[e.b], e.w});
    } else {
      edges.push_back({dd.plus_copy[e.a], dd.plus_copy[e.b], e.w / 2});
      edges.push_back({dd.minus_copy[e.a], dd.minus_copy[e.b], e.w / 2});
    }
  }
  dd.doubled = make_graph(m, edges);
  dd.doubled.dim = nb.dim;
  dd.doubled.h = nb.h;
  const int nd = dd.doubled.n();
  for (int k = 0; k < nd; ++k) dd.doubled.x[k] = nb.x[dd.base_of[k]];
  // the doubled space has no boundary; sigma stays zero
  dd.involution.resize(nd);
  for (int k = 0; k < nd; ++k) {
    const int b = dd.base_of[k];
    dd.involution[k] = dd.sign[k] > 0 ? dd.minus_copy[b] : dd.sign[k] < 0 ? dd.plus_copy[b] : k;
  }
  return dd;
}

Vec lift_symmetric(const DoubledDomain& dd, const Vec& h) {
  Vec out(dd.doubled.n());
  for (int k = 0; k < out.size(); ++k) out[k] = h[dd.base_of[k]];
  return out;
}

Vec lift_antisymmetric(const DoubledDomain& dd, const Vec& g) {
  Vec out(dd.doubled.n());
  for (int k = 0; k < out.size(); ++k) out[k] = dd.sign[k] * g[dd.base_of[k]];
  return out;
}

Vec lift_potential(const DoubledDomain& dd, const Vec& V) { return lift_symmetric(dd, V); }

Vec reflect(const DoubledDomain& dd, const Vec& f) {
  Vec out(f.size());
  for (int k = 0; k < f.size(); ++k) out[k] = f[dd.involution[k]];
  return out;
}

InequalityReport doubled_identity_check(const DoubledDomain& dd, const std::vector<Vec>& fs, double t, double tol,
                                        PropagatorOptions opt) {
  InequalityReport r;
  r.check_name = "doubled_identity";
  r.parameters["t"] = t;
  r.tolerance = tol;
  Propagator Ph(dd.doubled, Vec(), opt);
  Propagator Pn(dd.neumann, Vec(), opt);
  Propagator Pd(dd.dirichlet, Vec(), opt);
  const int nb = dd.neumann.n();
  const int nd = dd.doubled.n();
  r.node_margins = Vec::Constant(nd, kInf);
  double worst_err = 0;
  for (size_t c = 0; c < fs.size(); ++c) {
    const Vec& f = fs[c];
    Vec fp(nb), fm(nb);
    for (int i = 0; i < nb; ++i) {
      fp[i] = f[dd.plus_copy[i]];
      fm[i] = f[dd.minus_copy[i]];
    }
    const Vec lhs = Ph.apply(f, t);
    const Vec sym = Pn.apply(0.5 * (fp + fm), t);
    const Vec anti = Pd.apply(0.5 * (fp - fm), t);
    for (int k = 0; k < nd; ++k) {
      const int b = dd.base_of[k];
      const double rhs = sym[b] + (dd.sign[k] >= 0 ? 1.0 : -1.0) * anti[b];
      const double err = std::abs(lhs[k] - rhs);
      r.node_margins[k] = std::min(r.node_margins[k], -err);
      if (std::isnan(err)) r.nan_count++;
      if (err > worst_err || r.worst_node < 0) {
        worst_err = std::max(err, worst_err);
        r.worst_node = k;
        r.worst_test = static_cast<int>(c);
        r.worst_time = 0;
      }
    }
  }
  r.worst_margin = -worst_err;
  r.meta["max_error"] = worst_err;
  r.finalize();
  return r;
}

InequalityReport doubled_reduction_check(const DoubledDomain& dd, const std::vector<Vec>& hs,
                                         const std::vector<Vec>& gs, double t, double tol, PropagatorOptions opt) {
  InequalityReport r;
  r.check_name = "doubled_reductions";
  r.parameters["t"] = t;
  r.tolerance = tol;
  Propagator Ph(dd.doubled, Vec(), opt);
  Propagator Pn(dd.neumann, Vec(), opt);
  Propagator Pd(dd.dirichlet, Vec(), opt);
  const int nd = dd.doubled.n();
  r.node_margins = Vec::Constant(nd, kInf);
  double sym_err = 0, anti_err = 0;
  auto record = [&](const Vec& diff, int c, double& acc) {
    for (int k = 0; k < nd; ++k) {
      const double err = std::abs(diff[k]);
      if (std::isnan(err)) r.nan_count++;
      r.node_margins[k] = std::min(r.node_margins[k], -err);
      if (-err < r.worst_margin) {
        r.worst_margin = -err;
        r.worst_node = k;
        r.worst_test = c;
        r.worst_time = 0;
      }
      acc = std::max(acc, err);
    }
  };
  int c = 0;
  for (const auto& h : hs) record(Ph.apply(lift_symmetric(dd, h), t) - lift_symmetric(dd, Pn.apply(h, t)), c++, sym_err);
  for (const auto& g0 : gs) {
    const Vec g = restrict_free(dd.dirichlet, g0);
    record(Ph.apply(lift_antisymmetric(dd, g), t) - lift_antisymmetric(dd, Pd.apply(g, t)), c++, anti_err);
  }
  if (r.worst_margin > 0) r.worst_margin = 0;
  r.meta["symmetric_error"] = sym_err;
  r.meta["antisymmetric_error"] = anti_err;
  r.finalize();
  return r;
}

InequalityReport sub_taming_check(const DoubledDomain& dd, const TamingMeasure& kappa, const std::vector<Vec>& fs,
                                  const std::vector<double>& ts, const CheckOptions& opt) {
  InequalityReport r;
  r.check_name = "sub_taming";
  r.parameters["kappa"] = kappa.id;
  r.parameters["t"] = ts;
  const auto& nb = dd.neumann;
  const Vec V = node_potential(nb, kappa);
  Propagator P0(dd.dirichlet, Vec(), opt.prop);
  Propagator Pbar(nb, 0.5 * V, opt.prop);
  const int nt = static_cast<int>(ts.size());
  const int ncase = static_cast<int>(fs.size()) * nt;
  std::vector<Vec> margins(ncase);
  std::vector<double> scale(ncase, 0);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < ncase; ++c) {
    const Vec f = restrict_free(dd.dirichlet, fs[c / nt]);
    const double t = ts[c % nt];
    const Vec u = P0.apply(f, t);
    const Vec lhs = gamma(nb, u).cwiseMax(0.0).cwiseSqrt();
    const Vec rhs = Pbar.apply(gamma(nb, f).cwiseMax(0.0).cwiseSqrt(), t);
    scale[c] = rhs.cwiseAbs().maxCoeff();
    // relative to the size of the right side, so one C*h serves every test function
    margins[c] = (rhs - lhs) / std::max(scale[c], 1e-300);
  }
  r.node_margins = Vec::Constant(nb.n(), kInf);
  double sc = 0;
  for (int c = 0; c < ncase; ++c) {
    sc = std::max(sc, scale[c]);
    for (int i = 0; i < nb.n(); ++i) {
      const double v = margins[c][i];
      if (std::isnan(v)) {
        r.nan_count++;
        continue;
      }
      r.node_margins[i] = std::min(r.node_margins[i], v);
      if (v < r.worst_margin) {
        r.worst_margin = v;
        r.worst_node = i;
        r.worst_test = c / nt;
        r.worst_time = c % nt;
      }
    }
  }
  r.tolerance = opt.chain_C * nb.h;
  r.meta["tolerance_policy"] = "relative margin >= -C*h";
  r.meta["C"] = opt.chain_C;
  r.meta["scale"] = sc;
  r.meta["h"] = nb.h;
  r.finalize();
  return r;
}

InequalityReport doubled_route_check(const DoubledDomain& dd, const TamingMeasure& kappa, const std::vector<Vec>& fs,
                                     const std::vector<double>& ts, const CheckOptions& opt) {
  const Vec V = lift_potential(dd, node_potential(dd.neumann, kappa));
  TamingMeasure kh = bulk_measure(dd.doubled, V, kappa.id + "^");
  std::vector<Vec> lifted;
  for (const auto& f : fs) lifted.push_back(lift_antisymmetric(dd, restrict_free(dd.dirichlet, f)));
  InequalityReport r = check_ge(dd.doubled, kh, kInf, 1, lifted, ts, opt);
  r.check_name = "doubled_route_ge1";
  return r;
}

}  // namespace tamelab
