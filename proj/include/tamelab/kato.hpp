#pragma once

#include <string>
#include <vector>

#include "tamelab/taming.hpp"

namespace tamelab {

struct KatoRow {
  double t = 0;
  double rho = 0;
  double alpha = 0;          // 1/t
  double potential_sup = 0;  // alpha_potential_sup at that alpha
  int quad_points = 0;
};

// rho(t) = max_x int_0^t P_s |V| ds, integrated piecewise between successive
// entries of t_list.
std::vector<KatoRow> kato_profile(const GeneratorContext& ctx, const TamingMeasure& mu,
                                  const std::vector<double>& t_list, double rel_tol = 1e-6,
                                  PropagatorOptions opt = {});

// rho(t) for a bare nonnegative potential W
double kato_rho(const GeneratorContext& ctx, const Vec& W, double t, double rel_tol = 1e-6,
                PropagatorOptions opt = {});

double alpha_potential_sup(const GeneratorContext& ctx, const TamingMeasure& mu, double alpha);

double khasminskii_bound(double rho);

void write_profile_csv(const std::vector<KatoRow>& rows, const std::string& path);

// p-th power integral sum |ell|^p sigma over boundary nodes; sigma is the
// exposed face area.
double surface_lp_integral(const GridDomain& d, const Vec& ell, double p);
double surface_lp_norm(const GridDomain& d, const Vec& ell, double p);

struct SurfaceLpResult {
  double norm_coarse = 0, norm_fine = 0;
  double integral_coarse = 0, integral_fine = 0;
  double growth_exponent = 0;  // log2 of the integral ratio
  bool bounded = false;
  bool kato_prediction = false;
};

// Refinement trend at resolutions R and 2R: the integral is called bounded
// when its growth exponent stays below growth_threshold.
SurfaceLpResult surface_lp_check(const GridDomain& coarse, const Vec& ell_coarse, const GridDomain& fine,
                                 const Vec& ell_fine, double p, double growth_threshold = 0.25);

}  // namespace tamelab
