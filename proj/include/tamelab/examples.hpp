#pragma once

#include <vector>

#include "tamelab/kato.hpp"

namespace tamelab {

// The form E = (1/2) int Gamma dm generates L/2, so geometric curvature
// bounds (Ricci density, second fundamental form) are rates on the clock of
// (1/2) Laplacian. Against P_t = e^{tL} with L the full grid Laplacian they
// enter doubled.
constexpr double kGeometricClock = 2.0;

// V(x) = k |x|^{-2-2m} [2 sin+(|x|^-m) - sin-(|x|^-m)]   (variant 1)
// V(x) = k |x|^{-2-2m} [2 sin(|x|^-m) + 1]                (variant 2)
// set to zero inside the truncation radius r0.
Vec oscillating_shape(const GeneratorContext& ctx, double m, double r0, int variant);

// [-1,1]^2, reflecting walls, generator (1/2) Laplacian.
GeneratorContext oscillating_context(int n_nodes);

struct SweepResult {
  std::vector<double> k;
  std::vector<double> log_sup_c;
  bool monotone = true;
  double min_increment = 0;
  double crossing = -1;  // interpolated k where log sup C first reaches the threshold, -1 if never
};

// log sup_{t in [0, t_max]} C_t for kappa = k * shape, on a k grid, with the
// crossing refined by bisection.
SweepResult oscillating_sweep(const GeneratorContext& ctx, const Vec& shape, const std::vector<double>& ks,
                              double threshold = 1.0, double t_max = 1.0, int n_t = 20, int bisections = 12,
                              PropagatorOptions opt = {});

// Cusp z > phi(r), phi(r) = r - r^{2-alpha} (rounded to phi(sqrt(r^2+eps^2)) - phi(eps)
// when eps > 0), on [-1,1]^2 x [-0.5, 1], cell centred with h = 2/R. Returns the
// grid and the boundary curvature density (zero for r > 1).
struct CuspDomain {
  GridDomain grid;
  Vec ell;
};
CuspDomain cusp_domain(int R, double alpha, double eps = 0.0);

// Flat half-plane window [0,2) x [y0, 1] with bumps f_{r,h}(t) = h(-1-cos(pi t/r))
// dug into the boundary; curvature density of the bump profile.
struct Bump {
  double center, radius, height;
};
std::vector<Bump> default_bumps();
struct BumpDomain {
  GridDomain grid;
  Vec ell;
};
BumpDomain bump_domain(int R, const std::vector<Bump>& bumps);

// Smooth increasing cut-off: constant 2/(3j) near 0, identity on [1/j, 1],
// constant 2 beyond 3, C^1 Hermite blends in between.
void theta_cutoff(int j, double r, double& v, double& d1, double& d2);

// Time change psi_j = Psi(theta_j(|x|)), Psi(r) = r^{2+2m-l} sin(r^-m), and the
// curvature bound k_j = -(n-2)|grad psi_j|^2 - Laplacian psi_j, both per node.
struct TimeChange {
  Vec psi;
  Vec k;
};
TimeChange nowhere_kato_timechange(const GridDomain& d, int j, double m = 1.0, double l = 2.0);

// Curvature density of the wiggle family H_l, flattened onto the boundary of a
// half-plane: wiggle i (1-based) lives on [2 s_i, 4 s_i], s_i = 2^-i, with l = i + 1.
Vec wiggle_boundary_density(const GeneratorContext& ctx, int truncation);
// |kappa|(X) of that density.
double total_variation(const GeneratorContext& ctx, const Vec& ell);

}  // namespace tamelab
