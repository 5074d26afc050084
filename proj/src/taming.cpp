#include "tamelab/taming.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tamelab/errors.hpp"

namespace tamelab {

TamingMeasure zero_measure(const GeneratorContext& ctx) {
  return {Vec::Zero(ctx.n()), Vec::Zero(ctx.n()), 1.0, "zero"};
}

TamingMeasure constant_measure(const GeneratorContext& ctx, double c) {
  std::ostringstream os;
  os << "const(" << c << ")";
  return {Vec::Constant(ctx.n(), c), Vec::Zero(ctx.n()), 1.0, os.str()};
}

TamingMeasure bulk_measure(const GeneratorContext& ctx, const Vec& k, const std::string& id) {
  TamingMeasure m{k, Vec::Zero(ctx.n()), 1.0, id};
  validate(ctx, m);
  return m;
}

TamingMeasure boundary_measure(const GeneratorContext& ctx, const Vec& ell, const std::string& id) {
  TamingMeasure m{Vec::Zero(ctx.n()), ell, 1.0, id};
  validate(ctx, m);
  return m;
}

TamingMeasure scaled(const TamingMeasure& kappa, double p) {
  TamingMeasure m = kappa;
  m.p *= p;
  return m;
}

void validate(const GeneratorContext& ctx, const TamingMeasure& kappa) {
  if (kappa.k.size() != ctx.n() || kappa.ell.size() != ctx.n())
    throw std::invalid_argument("taming measure has wrong length");
  if (!kappa.k.allFinite() || !kappa.ell.allFinite() || !std::isfinite(kappa.p))
    throw std::invalid_argument("taming measure not finite");
  for (int i = 0; i < ctx.n(); ++i)
    if (!ctx.boundary[i] && kappa.ell[i] != 0)
      throw std::invalid_argument("boundary density nonzero off the boundary");
}

Vec node_potential(const GeneratorContext& ctx, const TamingMeasure& kappa) {
  validate(ctx, kappa);
  Vec V(ctx.n());
  for (int i = 0; i < ctx.n(); ++i) V[i] = kappa.p * (kappa.k[i] + kappa.ell[i] * ctx.sigma_over_m[i]);
  return V;
}

double energy_perturbed(const GeneratorContext& ctx, const Vec& f, const TamingMeasure& kappa) {
  validate(ctx, kappa);
  double bulk = 0, surface = 0;
  for (int i = 0; i < ctx.n(); ++i) {
    bulk += f[i] * f[i] * kappa.k[i] * ctx.m[i];
    if (ctx.boundary[i]) surface += f[i] * f[i] * kappa.ell[i] * ctx.sigma_over_m[i] * ctx.m[i];
  }
  return energy(ctx, f) + kappa.p * (bulk + surface);
}

Vec taming_apply(const GeneratorContext& ctx, const TamingMeasure& kappa, const Vec& f, double t,
                 PropagatorOptions opt) {
  return Propagator(ctx, node_potential(ctx, kappa), opt).apply(f, t);
}

double moderateness_constant(const Propagator& P, double t) {
  const auto& ctx = P.context();
  if (t == 0) return 1.0;
  return max_free(ctx, P.apply(Vec::Ones(ctx.n()), t));
}

double moderateness_constant(const GeneratorContext& ctx, const TamingMeasure& kappa, double t,
                             PropagatorOptions opt) {
  return moderateness_constant(Propagator(ctx, node_potential(ctx, kappa), opt), t);
}

std::vector<std::vector<double>> moderateness_sweep(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                                    const std::vector<double>& t_grid,
                                                    const std::vector<double>& p_grid,
                                                    PropagatorOptions opt) {
  std::vector<std::vector<double>> table(p_grid.size(), std::vector<double>(t_grid.size()));
  for (size_t i = 0; i < p_grid.size(); ++i) {
    Propagator P(ctx, node_potential(ctx, scaled(kappa, p_grid[i])), opt);
    for (size_t j = 0; j < t_grid.size(); ++j) table[i][j] = moderateness_constant(P, t_grid[j]);
  }
  return table;
}

double log_sup_moderateness(const GeneratorContext& ctx, const Vec& V, double t_max, int n_t,
                            PropagatorOptions opt) {
  Propagator P(ctx, V, opt);
  Vec u = restrict_free(ctx, Vec::Ones(ctx.n()));
  double logs_total = 0, best = 0;  // C_0 = 1
  const double dt = t_max / n_t;
  for (int j = 0; j < n_t; ++j) {
    double logs = 0;
    u = P.apply_scaled(u, dt, logs);
    logs_total += logs;
    const double mx = max_free(ctx, u);
    if (!(mx > 0)) break;
    const double lc = std::log(mx) + logs_total;
    best = std::max(best, lc);
    u /= mx;
    logs_total += std::log(mx);
  }
  return best;
}

Vec trotter_apply(const GeneratorContext& ctx, const Vec& V, const Vec& f, double t, int n,
                  PropagatorOptions opt) {
  Propagator P(ctx, Vec(), opt);
  const double dt = t / n;
  Vec damp(ctx.n());
  for (int i = 0; i < ctx.n(); ++i) damp[i] = std::exp(-dt * V[i]);
  Vec u = restrict_free(ctx, f);
  for (int s = 0; s < n; ++s) u = P.apply(u.cwiseProduct(damp), dt);
  return u;
}

Vec read_node_table(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw ConfigParse("cannot open node table '" + path + "'");
  Vec out = Vec::Zero(n);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    long idx;
    double v;
    if (!(is >> idx >> v)) {
      if (lineno == 1) continue;  // header
      throw ConfigParse(path + ":" + std::to_string(lineno) + ": expected node-index,value");
    }
    if (idx < 0 || idx >= n) throw ConfigParse(path + ":" + std::to_string(lineno) + ": node index out of range");
    out[idx] = v;
  }
  return out;
}

}  // namespace tamelab
