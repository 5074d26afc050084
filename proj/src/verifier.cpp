#include "tamelab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "tamelab/errors.hpp"
#include "tamelab/quadrature.hpp"

namespace tamelab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::ReportOnly: return "report-only";
  }
  return "?";
}

void InequalityReport::finalize() {
  if (report_only) {
    verdict = Verdict::ReportOnly;
    return;
  }
  verdict = (worst_margin >= -tolerance && nan_count == 0) ? Verdict::Pass : Verdict::Fail;
}

static nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["check"] = r.check_name;
  j["parameters"] = r.parameters;
  j["worst_margin"] = num(r.worst_margin);
  j["worst_location"] = {{"node", r.worst_node}, {"test", r.worst_test}, {"time", r.worst_time}};
  j["tolerance"] = num(r.tolerance);
  j["verdict"] = to_string(r.verdict);
  j["nan_count"] = r.nan_count;
  if (r.refinement_trend)
    j["refinement_trend"] = {num(r.refinement_trend->first), num(r.refinement_trend->second)};
  j["meta"] = r.meta;
  return j;
}

void write_margins_csv(const InequalityReport& r, const GeneratorContext& ctx, const std::string& path) {
  std::ofstream out(path);
  out << "node,x,y,z,margin\n" << std::setprecision(17);
  for (int i = 0; i < r.node_margins.size(); ++i) {
    if (!std::isfinite(r.node_margins[i])) continue;
    out << i << "," << ctx.x[i][0] << "," << ctx.x[i][1] << "," << ctx.x[i][2] << "," << r.node_margins[i] << "\n";
  }
}

namespace {

struct CaseResult {
  Vec margin;
  double scale = 0;
};

// Cases are indexed test-major; merging in index order keeps reports
// independent of the thread count.
void merge(InequalityReport& r, const GeneratorContext& ctx, const std::vector<CaseResult>& cases, int n_t,
           int test_offset = 0) {
  if (r.node_margins.size() != ctx.n()) r.node_margins = Vec::Constant(ctx.n(), kInf);
  for (size_t c = 0; c < cases.size(); ++c) {
    const Vec& m = cases[c].margin;
    if (m.size() == 0) continue;
    for (int i : ctx.free_nodes) {
      const double v = m[i];
      if (std::isnan(v)) {
        r.nan_count++;
        continue;
      }
      if (v < r.node_margins[i]) r.node_margins[i] = v;
      if (v < r.worst_margin) {
        r.worst_margin = v;
        r.worst_node = i;
        r.worst_test = static_cast<int>(c) / n_t + test_offset;
        r.worst_time = static_cast<int>(c) % n_t;
      }
    }
  }
}

double max_scale(const std::vector<CaseResult>& cases) {
  double s = 0;
  for (const auto& c : cases) s = std::max(s, c.scale);
  return s;
}

// Chain-rule checks compare rhs - lhs against C*h relative to each case's own
// right side; the floor keeps rounding noise on near-constant tests harmless.
void relativize(std::vector<CaseResult>& cases) {
  const double floor = 1e-9 * std::max(max_scale(cases), 1e-300);
  for (auto& c : cases)
    if (c.margin.size()) c.margin /= std::max(c.scale, floor);
}

Vec sqrt_cut(const Vec& g) {
  Vec out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = g[i] > kEpsGamma ? std::sqrt(g[i]) : 0.0;
  return out;
}

Vec inv_sqrt_cut(const Vec& g) {
  Vec out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = g[i] > kEpsGamma ? 1.0 / std::sqrt(g[i]) : 0.0;
  return out;
}

Vec half(const Vec& V) { return 0.5 * V; }

double sup_abs_free(const GeneratorContext& ctx, const Vec& v) {
  double s = 0;
  for (int i : ctx.free_nodes) s = std::max(s, std::abs(v[i]));
  return s;
}

nlohmann::json params(const TamingMeasure& kappa, double N) {
  nlohmann::json p;
  p["kappa"] = kappa.id;
  p["p"] = kappa.p;
  p["N"] = num(N);
  return p;
}

}  // namespace

std::vector<Vec> test_battery(const GeneratorContext& ctx, int n_random, std::uint64_t seed, bool coordinates,
                              int n_indicators) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, ctx.n() - 1);
  Propagator smooth(ctx);
  const double s = ctx.h * ctx.h;
  std::vector<Vec> out;
  for (int k = 0; k < n_random; ++k) {
    Vec g(ctx.n());
    for (int i = 0; i < ctx.n(); ++i) g[i] = nd(rng);
    out.push_back(smooth.apply(g, s));
  }
  if (coordinates)
    for (int a = 0; a < ctx.dim; ++a) out.push_back(coordinate(ctx, a));
  double extent = 0;
  for (int i = 0; i < ctx.n(); ++i)
    for (int a = 0; a < ctx.dim; ++a) extent = std::max(extent, std::abs(ctx.x[i][a] - ctx.x[0][a]));
  for (int k = 0; k < n_indicators; ++k) {
    const Point c = ctx.x[pick(rng)];
    const double r = 0.2 * extent + ctx.h;
    Vec g(ctx.n());
    for (int i = 0; i < ctx.n(); ++i) {
      double d2 = 0;
      for (int a = 0; a < ctx.dim; ++a) d2 += (ctx.x[i][a] - c[a]) * (ctx.x[i][a] - c[a]);
      g[i] = d2 <= r * r ? 1.0 : 0.0;
    }
    out.push_back(smooth.apply(g, s));
  }
  return out;
}

std::vector<Vec> positive_battery(const GeneratorContext& ctx, int n, std::uint64_t seed) {
  auto base = test_battery(ctx, n, seed, false, 0);
  std::vector<Vec> out;
  for (auto& g : base) {
    Vec f = g.array().exp();
    out.push_back(f);
  }
  return out;
}

std::vector<Vec> bump_battery(const GeneratorContext& ctx, int n, double s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, ctx.n_free() - 1);
  Propagator P(ctx);
  std::vector<Vec> out;
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(ctx.n());
    e[ctx.free_nodes[pick(rng)]] = 1.0;
    out.push_back(P.apply(e, s));
  }
  return out;
}

InequalityReport check_ge(const GeneratorContext& ctx, const TamingMeasure& kappa, double N, int order,
                          const std::vector<Vec>& fs, const std::vector<double>& ts, const CheckOptions& opt) {
  if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
  InequalityReport r;
  r.check_name = order == 2 ? "ge2" : "ge1";
  r.parameters = params(kappa, N);
  r.parameters["t"] = ts;
  const Vec V = node_potential(ctx, kappa);
  Propagator P(ctx, Vec(), opt.prop);
  Propagator Pk(ctx, order == 2 ? V : half(V), opt.prop);
  const bool finite_N = std::isfinite(N);
  const int nt = static_cast<int>(ts.size());
  const int ncase = static_cast<int>(fs.size()) * nt;

  // GE2'' constant C_t = sup_{s<=t} C_s^{-kappa}
  std::vector<double> Ct(nt, 1.0);
  bool variant = order == 2 && finite_N;
  if (variant) {
    Propagator Pm(ctx, -V, opt.prop);
    for (int j = 0; j < nt; ++j) {
      double c = 1.0;
      for (int q = 1; q <= 32; ++q) c = std::max(c, moderateness_constant(Pm, ts[j] * q / 32.0));
      Ct[j] = c;
      if (!std::isfinite(c)) variant = false;
    }
  }

  std::vector<CaseResult> cases(ncase), variant_cases(variant ? ncase : 0);
  int quad_max = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : quad_max)
  for (int c = 0; c < ncase; ++c) {
    const Vec& f = fs[c / nt];
    const double t = ts[c % nt];
    const Vec ft = P.apply(f, t);
    const Vec Gf = gamma(ctx, f);
    const Vec Gft = gamma(ctx, ft);
    Vec lhs, rhs;
    if (order == 2) {
      lhs = Gft;
      rhs = Pk.apply(Gf, t);
      if (finite_N) {
        QuadInfo qi;
        const Vec I = simpson(
            [&](double s) {
              const Vec Lu = apply_L(ctx, P.apply(f, t - s));
              return Pk.apply(Lu.cwiseProduct(Lu), s);
            },
            0.0, t, opt.quad_rel_tol, opt.min_quad_points, opt.max_quad_points, &qi);
        quad_max = std::max(quad_max, qi.points);
        lhs += (4.0 / N) * I;
        const Vec Lft = apply_L(ctx, ft);
        variant_cases[c].margin = rhs - Gft - (4.0 * t / (N * Ct[c % nt])) * Lft.cwiseProduct(Lft);
      }
    } else {
      lhs = sqrt_cut(Gft);
      rhs = Pk.apply(sqrt_cut(Gf), t);
      if (finite_N) {
        QuadInfo qi;
        const Vec I = simpson(
            [&](double s) {
              const Vec u = P.apply(f, t - s);
              const Vec Lu = apply_L(ctx, u);
              return Pk.apply(Lu.cwiseProduct(Lu).cwiseProduct(inv_sqrt_cut(gamma(ctx, u))), s);
            },
            0.0, t, opt.quad_rel_tol, opt.min_quad_points, opt.max_quad_points, &qi);
        quad_max = std::max(quad_max, qi.points);
        lhs += (2.0 / N) * I;
      }
    }
    cases[c].margin = rhs - lhs;
    cases[c].scale = sup_abs_free(ctx, rhs);
  }
  const double scale1 = max_scale(cases);
  if (order == 1) relativize(cases);
  merge(r, ctx, cases, nt);
  if (variant) {
    InequalityReport rv;
    merge(rv, ctx, variant_cases, nt);
    r.meta["ge2_variant_worst_margin"] = num(rv.worst_margin);
    r.meta["ge2_variant_C_t"] = Ct;
    if (rv.worst_margin < r.worst_margin) {
      r.worst_margin = rv.worst_margin;
      r.worst_node = rv.worst_node;
      r.worst_test = rv.worst_test;
      r.worst_time = rv.worst_time;
    }
    r.nan_count += rv.nan_count;
  }
  if (order == 1) {
    r.tolerance = opt.chain_C * ctx.h;
    r.meta["tolerance_policy"] = "relative margin >= -C*h";
    r.meta["C"] = opt.chain_C;
    r.meta["scale"] = scale1;
    r.meta["calibrated_C"] = std::max(0.0, -r.worst_margin) / ctx.h;
  } else {
    r.tolerance = opt.tol;
  }
  r.meta["quad_points_max"] = quad_max;
  r.finalize();
  return r;
}

InequalityReport check_be2(const GeneratorContext& ctx, const TamingMeasure& kappa, double N,
                           const std::vector<Vec>& fs, const std::vector<Vec>& phis, const CheckOptions& opt) {
  InequalityReport r;
  r.check_name = "be2";
  r.parameters = params(kappa, N);
  r.meta["test_class"] = "smoothed battery (no canonical discrete analogue of the Bochner test class)";
  const Vec V = node_potential(ctx, kappa);
  const int nphi = static_cast<int>(phis.size());
  const int ncase = static_cast<int>(fs.size()) * nphi;
  std::vector<double> margin(ncase), scale(ncase);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < ncase; ++c) {
    const Vec& f = fs[c / nphi];
    const Vec phi = restrict_free(ctx, phis[c % nphi]);
    const Vec Lf = apply_L(ctx, f);
    const Vec Gf = gamma(ctx, f);
    const Vec GfLf = gamma(ctx, f, Lf);
    const Vec Lkphi = apply_L(ctx, phi) - V.cwiseProduct(phi);
    double a = 0, b = 0, d = 0, sc = 0;
    for (int i : ctx.free_nodes) {
      const double m = ctx.m[i];
      a += m * Lkphi[i] * Gf[i];
      b += m * phi[i] * GfLf[i];
      if (std::isfinite(N)) d += m * phi[i] * Lf[i] * Lf[i];
      sc += m * (std::abs(Lkphi[i] * Gf[i]) + 2 * std::abs(phi[i] * GfLf[i]));
    }
    margin[c] = a - 2 * b - (std::isfinite(N) ? 4.0 / N * d : 0.0);
    scale[c] = sc;
  }
  double sc_max = 0;
  for (int c = 0; c < ncase; ++c) {
    if (std::isnan(margin[c])) {
      r.nan_count++;
      continue;
    }
    sc_max = std::max(sc_max, scale[c]);
    if (margin[c] < r.worst_margin) {
      r.worst_margin = margin[c];
      r.worst_test = c / nphi;
      r.worst_time = c % nphi;  // phi index
    }
  }
  r.meta["scale"] = sc_max;
  r.tolerance = opt.tol;
  r.finalize();
  return r;
}

nlohmann::json ge_be_cross_consistency(const InequalityReport& ge, const InequalityReport& be, double c) {
  nlohmann::json j;
  const bool ge_pass = ge.worst_margin >= -ge.tolerance;
  const bool be_pass = be.worst_margin >= -c * ge.tolerance;
  j["ge_pass"] = ge_pass;
  j["be_pass_at_c_tau"] = be_pass;
  j["c"] = c;
  j["consistent"] = !ge_pass || be_pass;
  return j;
}

InequalityReport check_poincare(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                const std::vector<Vec>& fs, double t, const CheckOptions& opt) {
  InequalityReport r;
  r.check_name = "poincare";
  r.parameters = params(kappa, kInf);
  r.parameters["t"] = t;
  Propagator P(ctx, Vec(), opt.prop);
  Propagator Pk(ctx, node_potential(ctx, kappa), opt.prop);
  QuadInfo qa, qb;
  const double Cbar =
      simpson_scalar([&](double s) { return moderateness_constant(Pk, s); }, 0, t, opt.quad_rel_tol,
                     opt.min_quad_points, opt.max_quad_points, &qa) / t;
  const double Cunder =
      simpson_scalar([&](double s) { return 1.0 / moderateness_constant(Pk, s); }, 0, t, opt.quad_rel_tol,
                     opt.min_quad_points, opt.max_quad_points, &qb) / t;
  r.meta["C_bar"] = Cbar;
  r.meta["C_under"] = Cunder;
  r.meta["two_moderate_C2"] = moderateness_constant(ctx, scaled(kappa, 2.0), t, opt.prop);
  const int nf = static_cast<int>(fs.size());
  std::vector<CaseResult> lower(nf), upper(nf);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < nf; ++c) {
    const Vec& f = fs[c];
    const Vec ft = P.apply(f, t);
    const Vec mid = (P.apply(f.cwiseProduct(f), t) - ft.cwiseProduct(ft)) / (2 * t);
    lower[c].margin = mid - Cunder * gamma(ctx, ft);
    upper[c].margin = Cbar * P.apply(gamma(ctx, f), t) - mid;
  }
  InequalityReport lo, up;
  merge(lo, ctx, lower, 1);
  merge(up, ctx, upper, 1);
  r.meta["lower_worst_margin"] = num(lo.worst_margin);
  r.meta["upper_worst_margin"] = num(up.worst_margin);
  const InequalityReport& w = lo.worst_margin <= up.worst_margin ? lo : up;
  r.worst_margin = w.worst_margin;
  r.worst_node = w.worst_node;
  r.worst_test = w.worst_test;
  r.worst_time = 0;
  r.meta["worst_side"] = &w == &lo ? "lower" : "upper";
  r.node_margins = lo.node_margins.cwiseMin(up.node_margins);
  r.nan_count = lo.nan_count + up.nan_count;
  r.tolerance = opt.tol;
  r.finalize();
  return r;
}

InequalityReport check_logsobolev(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                  const std::vector<Vec>& fs, double t, const CheckOptions& opt) {
  for (const auto& f : fs)
    if (!(min_free(ctx, f) > 0)) throw NonPositiveTestFunction("log-Sobolev needs f > 0 on free nodes");
  InequalityReport r;
  r.check_name = "logsobolev";
  r.parameters = params(kappa, kInf);
  r.parameters["t"] = t;
  const Vec V = node_potential(ctx, kappa);
  Propagator P(ctx, Vec(), opt.prop);
  Propagator Pk(ctx, V, opt.prop);
  Propagator Ph(ctx, half(V), opt.prop);
  const int nf = static_cast<int>(fs.size());
  std::vector<CaseResult> lower(nf), upper(nf);
  std::vector<double> gap_min(nf, kInf);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < nf; ++c) {
    const Vec& f = fs[c];
    const Vec ft = P.apply(f, t);
    Vec flogf(ctx.n()), ent(ctx.n()), ratio(ctx.n());
    const Vec Gf = gamma(ctx, f);
    for (int i = 0; i < ctx.n(); ++i) {
      flogf[i] = ctx.dirichlet[i] ? 0.0 : f[i] * std::log(f[i]);
      ratio[i] = ctx.dirichlet[i] ? 0.0 : Gf[i] / f[i];
    }
    const Vec Pflogf = P.apply(flogf, t);
    for (int i = 0; i < ctx.n(); ++i)
      ent[i] = ctx.dirichlet[i] ? 0.0 : Pflogf[i] - (ft[i] > 0 ? ft[i] * std::log(ft[i]) : 0.0);
    for (int i : ctx.free_nodes) gap_min[c] = std::min(gap_min[c], ent[i]);
    const Vec Gft = gamma(ctx, ft);
    const Vec lo = simpson(
        [&](double s) {
          const Vec den = Ph.apply(P.apply(f, t - s), s);
          Vec q = Vec::Zero(ctx.n());
          for (int i : ctx.free_nodes) q[i] = Gft[i] / den[i];
          return q;
        },
        0.0, t, opt.quad_rel_tol, opt.min_quad_points, opt.max_quad_points);
    const Vec up = simpson([&](double s) { return P.apply(Pk.apply(ratio, t - s), s); }, 0.0, t,
                           opt.quad_rel_tol, opt.min_quad_points, opt.max_quad_points);
    lower[c].margin = ent - lo;
    upper[c].margin = up - ent;
  }
  InequalityReport lo, up;
  merge(lo, ctx, lower, 1);
  merge(up, ctx, upper, 1);
  double g = kInf;
  for (double v : gap_min) g = std::min(g, v);
  r.meta["entropy_gap_min"] = num(g);
  r.meta["lower_worst_margin"] = num(lo.worst_margin);
  r.meta["upper_worst_margin"] = num(up.worst_margin);
  const InequalityReport& w = lo.worst_margin <= up.worst_margin ? lo : up;
  r.worst_margin = w.worst_margin;
  r.worst_node = w.worst_node;
  r.worst_test = w.worst_test;
  r.worst_time = 0;
  r.meta["worst_side"] = &w == &lo ? "lower" : "upper";
  r.node_margins = lo.node_margins.cwiseMin(up.node_margins);
  r.nan_count = lo.nan_count + up.nan_count;
  r.tolerance = opt.tol;
  r.finalize();
  return r;
}

InequalityReport check_selfimprovement(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                       const std::vector<Vec>& fs, double t, const std::vector<double>& alphas,
                                       const CheckOptions& opt) {
  for (double a : alphas)
    if (a < 0.5 || a > 1) throw std::invalid_argument("alpha must lie in [1/2, 1]");
  InequalityReport r;
  r.check_name = "selfimprovement";
  r.parameters = params(kappa, kInf);
  r.parameters["t"] = t;
  r.parameters["alpha"] = alphas;
  r.report_only = true;
  const Vec V = node_potential(ctx, kappa);
  Propagator P(ctx, Vec(), opt.prop);
  const int nf = static_cast<int>(fs.size());
  const int na = static_cast<int>(alphas.size());
  std::vector<Propagator> Pa;
  for (double a : alphas) Pa.emplace_back(ctx, a * V, opt.prop);
  std::vector<CaseResult> cases(nf * na);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < nf * na; ++c) {
    const Vec& f = fs[c / na];
    const double a = alphas[c % na];
    const Vec Gft = gamma(ctx, P.apply(f, t));
    const Vec Gf = gamma(ctx, f);
    Vec lhs(ctx.n()), pw(ctx.n());
    for (int i = 0; i < ctx.n(); ++i) {
      lhs[i] = std::pow(std::max(Gft[i], 0.0), a);
      pw[i] = std::pow(std::max(Gf[i], 0.0), a);
    }
    const Vec rhs = Pa[c % na].apply(pw, t);
    cases[c].margin = rhs - lhs;
    cases[c].scale = sup_abs_free(ctx, rhs);
  }
  relativize(cases);
  merge(r, ctx, cases, na);
  // per-alpha summaries; worst_time carries the alpha index
  nlohmann::json per = nlohmann::json::array();
  std::vector<bool> pass(na);
  for (int k = 0; k < na; ++k) {
    double worst = kInf;
    for (int c = k; c < nf * na; c += na)
      for (int i : ctx.free_nodes) worst = std::min(worst, cases[c].margin[i]);
    const double tol = opt.chain_C * ctx.h;
    pass[k] = worst >= -tol;
    per.push_back({{"alpha", alphas[k]}, {"worst_margin", num(worst)}, {"tolerance", tol}, {"pass", pass[k]}});
  }
  r.meta["per_alpha"] = per;
  // does passing at alpha = 1 predict passing at the smaller powers?
  int one = -1;
  for (int k = 0; k < na; ++k)
    if (alphas[k] == 1.0) one = k;
  if (one >= 0) {
    bool predicted = true;
    for (int k = 0; k < na; ++k)
      if (pass[one] && !pass[k]) predicted = false;
    r.meta["monotone_prediction_holds"] = predicted;
  }
  r.tolerance = opt.chain_C * ctx.h;
  r.finalize();
  return r;
}

InequalityReport check_gamma_gamma(const GeneratorContext& ctx, const TamingMeasure& kappa, double N,
                                   const std::vector<Vec>& fs, const CheckOptions& opt) {
  InequalityReport r;
  r.check_name = "gamma_gamma";
  r.parameters = params(kappa, N);
  r.report_only = true;
  const Vec V = node_potential(ctx, kappa);
  const int nf = static_cast<int>(fs.size());
  std::vector<CaseResult> cases(nf);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < nf; ++c) {
    const Vec& f = fs[c];
    const Vec Lf = apply_L(ctx, f);
    const Vec Gf = gamma(ctx, f);
    const Vec GG = gamma(ctx, Gf);
    const Vec g2 = 0.5 * (apply_L(ctx, restrict_free(ctx, Gf)) - V.cwiseProduct(Gf)) - gamma(ctx, f, Lf);
    Vec rhs = g2;
    if (std::isfinite(N)) rhs -= (2.0 / N) * Lf.cwiseProduct(Lf);
    rhs = 4.0 * rhs.cwiseProduct(Gf);
    cases[c].margin = rhs - GG;
    cases[c].scale = sup_abs_free(ctx, GG);
  }
  merge(r, ctx, cases, 1);
  // margin distribution summary
  std::vector<double> all;
  for (const auto& c : cases)
    for (int i : ctx.free_nodes) all.push_back(c.margin[i]);
  std::sort(all.begin(), all.end());
  if (!all.empty()) {
    r.meta["margin_quantiles"] = {num(all.front()), num(all[all.size() / 10]), num(all[all.size() / 2]),
                                  num(all[all.size() * 9 / 10]), num(all.back())};
  }
  const double scale = max_scale(cases);
  r.meta["scale"] = scale;
  r.meta["C"] = std::max(0.0, -r.worst_margin) / (ctx.h * std::max(scale, 1e-300));
  r.tolerance = opt.chain_C * ctx.h * scale;
  r.finalize();
  return r;
}

InequalityReport check_holder(const GeneratorContext& ctx, const TamingMeasure& kappa, double q,
                              const std::vector<Vec>& fs, const std::vector<double>& ts, const CheckOptions& opt) {
  if (!(q > 1)) throw std::invalid_argument("q must exceed 1");
  InequalityReport r;
  r.check_name = "holder";
  r.parameters = params(kappa, kInf);
  r.parameters["q"] = q;
  const double p = q / (q - 1);
  const Vec V = node_potential(ctx, kappa);
  Propagator P(ctx, Vec(), opt.prop);
  Propagator Pk(ctx, V, opt.prop);
  Propagator Pq(ctx, q * V, opt.prop);
  const int nt = static_cast<int>(ts.size());
  std::vector<double> Cq(nt);
  for (int j = 0; j < nt; ++j) Cq[j] = moderateness_constant(Pq, ts[j]);
  const int ncase = static_cast<int>(fs.size()) * nt;
  std::vector<CaseResult> cases(ncase);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < ncase; ++c) {
    const Vec& f = fs[c / nt];
    const double t = ts[c % nt];
    const Vec lhs = Pk.apply(f, t).cwiseAbs();
    const Vec fp = f.array().abs().pow(p);
    const Vec rhs = std::pow(Cq[c % nt], 1.0 / q) * P.apply(fp, t).array().max(0.0).pow(1.0 / p).matrix();
    cases[c].margin = rhs - lhs;
  }
  merge(r, ctx, cases, nt);
  r.tolerance = opt.tol;
  r.finalize();
  return r;
}

InequalityReport check_jensen(const GeneratorContext& ctx, const TamingMeasure& kappa, Phi phi,
                              const std::vector<std::vector<Vec>>& tuples, const std::vector<double>& ts,
                              const CheckOptions& opt) {
  InequalityReport r;
  r.check_name = phi == Phi::Euclidean ? "jensen_euclidean" : "jensen_maxpos";
  r.parameters = params(kappa, kInf);
  Propagator Pk(ctx, node_potential(ctx, kappa), opt.prop);
  auto Phi_of = [&](const std::vector<Vec>& v) {
    Vec out(ctx.n());
    for (int i = 0; i < ctx.n(); ++i) {
      double acc = 0;
      for (const auto& x : v) {
        if (phi == Phi::Euclidean) acc += x[i] * x[i];
        else acc = std::max(acc, x[i]);
      }
      out[i] = phi == Phi::Euclidean ? std::sqrt(acc) : acc;
    }
    return out;
  };
  const int nt = static_cast<int>(ts.size());
  const int ncase = static_cast<int>(tuples.size()) * nt;
  std::vector<CaseResult> cases(ncase);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < ncase; ++c) {
    const auto& tup = tuples[c / nt];
    const double t = ts[c % nt];
    std::vector<Vec> pf;
    for (const auto& f : tup) pf.push_back(Pk.apply(f, t));
    cases[c].margin = Pk.apply(Phi_of(tup), t) - Phi_of(pf);
  }
  merge(r, ctx, cases, nt);
  r.tolerance = opt.tol;
  r.finalize();
  return r;
}

InequalityReport check_square(const GeneratorContext& ctx, const TamingMeasure& kappa, const std::vector<Vec>& fs,
                              const std::vector<double>& ts, const CheckOptions& opt) {
  InequalityReport r;
  r.check_name = "square_domination";
  r.parameters = params(kappa, kInf);
  const Vec V = node_potential(ctx, kappa);
  Propagator Pk(ctx, V, opt.prop);
  Propagator P2(ctx, 2.0 * V, opt.prop);
  const int nt = static_cast<int>(ts.size());
  const int ncase = static_cast<int>(fs.size()) * nt;
  std::vector<CaseResult> cases(ncase);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < ncase; ++c) {
    const Vec& f = fs[c / nt];
    const double t = ts[c % nt];
    const Vec u = Pk.apply(f, t);
    cases[c].margin = P2.apply(f.cwiseProduct(f), t) - u.cwiseProduct(u);
  }
  merge(r, ctx, cases, nt);
  r.tolerance = opt.tol;
  r.finalize();
  return r;
}

}  // namespace tamelab
