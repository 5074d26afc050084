#include "tamelab/kato.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "tamelab/errors.hpp"
#include "tamelab/quadrature.hpp"

namespace tamelab {

std::vector<KatoRow> kato_profile(const GeneratorContext& ctx, const TamingMeasure& mu,
                                  const std::vector<double>& t_list, double rel_tol, PropagatorOptions opt) {
  Vec W = node_potential(ctx, mu).cwiseAbs();
  W = restrict_free(ctx, W);
  Propagator P(ctx, Vec(), opt);
  std::vector<KatoRow> rows;
  Vec acc = Vec::Zero(ctx.n());
  double prev = 0;
  for (double t : t_list) {
    if (!(t > prev)) throw std::invalid_argument("t_list must be positive and increasing");
    QuadInfo qi;
    acc += simpson([&](double s) { return P.apply(W, s); }, prev, t, rel_tol, 3, 4097, &qi);
    prev = t;
    KatoRow r;
    r.t = t;
    r.rho = std::max(0.0, max_free(ctx, acc));
    r.alpha = 1.0 / t;
    r.potential_sup = alpha_potential_sup(ctx, mu, r.alpha);
    r.quad_points = qi.points;
    rows.push_back(r);
  }
  return rows;
}

double kato_rho(const GeneratorContext& ctx, const Vec& W, double t, double rel_tol, PropagatorOptions opt) {
  Propagator P(ctx, Vec(), opt);
  const Vec Wf = restrict_free(ctx, W.cwiseAbs());
  const Vec acc = simpson([&](double s) { return P.apply(Wf, s); }, 0.0, t, rel_tol, 3, 4097);
  return std::max(0.0, max_free(ctx, acc));
}

double alpha_potential_sup(const GeneratorContext& ctx, const TamingMeasure& mu, double alpha) {
  const Vec W = node_potential(ctx, mu).cwiseAbs();
  return std::max(0.0, max_free(ctx, resolvent_apply(ctx, W, alpha)));
}

double khasminskii_bound(double rho) {
  if (!(rho >= 0) || rho >= 1) throw RhoOutOfRange("rho = " + std::to_string(rho));
  return 1.0 / (1.0 - rho);
}

void write_profile_csv(const std::vector<KatoRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << "t,rho,alpha,potential_sup\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.t << "," << r.rho << "," << r.alpha << "," << r.potential_sup << "\n";
}

double surface_lp_integral(const GridDomain& d, const Vec& ell, double p) {
  if (p < 1) throw std::invalid_argument("p must be at least 1");
  // sigma at a node = (sigma/m) * cell volume = total exposed face area
  double s = 0;
  for (int k : d.boundary_set) s += std::pow(std::abs(ell[k]), p) * d.sigma_over_m[k] * d.cell_volume();
  return s;
}

double surface_lp_norm(const GridDomain& d, const Vec& ell, double p) {
  return std::pow(surface_lp_integral(d, ell, p), 1.0 / p);
}

SurfaceLpResult surface_lp_check(const GridDomain& coarse, const Vec& ell_coarse, const GridDomain& fine,
                                 const Vec& ell_fine, double p, double growth_threshold) {
  SurfaceLpResult r;
  r.integral_coarse = surface_lp_integral(coarse, ell_coarse, p);
  r.integral_fine = surface_lp_integral(fine, ell_fine, p);
  r.norm_coarse = std::pow(r.integral_coarse, 1.0 / p);
  r.norm_fine = std::pow(r.integral_fine, 1.0 / p);
  r.growth_exponent = std::log2(r.integral_fine / r.integral_coarse);
  r.bounded = r.growth_exponent < growth_threshold;
  r.kato_prediction = r.bounded && p > coarse.dim - 1;
  return r;
}

}  // namespace tamelab
