#pragma once

#include <vector>

#include "tamelab/verifier.hpp"

namespace tamelab {

// Two copies of the interior glued along the boundary nodes (the seam).
// Copy nodes carry m/2, seam nodes their single-copy mass; copy-copy and
// copy-seam edges carry w/2, seam-seam edges w.
struct DoubledDomain {
  GridDomain base;
  GeneratorContext neumann;
  GeneratorContext dirichlet;
  GeneratorContext doubled;
  std::vector<int> plus_copy, minus_copy;  // base node -> doubled node
  std::vector<int> seam;                   // base nodes
  std::vector<int> base_of;                // doubled node -> base node
  std::vector<int> sign;                   // doubled node: +1, -1, 0 on the seam
  std::vector<int> involution;             // doubled node -> mirror node
};

DoubledDomain build_doubled(const GridDomain& domain, const Weights& weights = {});

Vec lift_symmetric(const DoubledDomain& dd, const Vec& h);
Vec lift_antisymmetric(const DoubledDomain& dd, const Vec& g);
Vec lift_potential(const DoubledDomain& dd, const Vec& V);
Vec reflect(const DoubledDomain& dd, const Vec& f);  // f o iota

// ||T^_t f (x,+-) - [Tbar_t (f+ + f-)/2 +- T0_t (f+ - f-)/2](x)||; margins are
// minus the pointwise error.
InequalityReport doubled_identity_check(const DoubledDomain& dd, const std::vector<Vec>& fs, double t,
                                        double tol = 1e-9, PropagatorOptions opt = {});

// T^_t h^ = (Tbar_t h)^ for symmetric lifts and T^_t g^ = (T0_t g)^ for
// antisymmetric ones; margins are minus the pointwise error.
InequalityReport doubled_reduction_check(const DoubledDomain& dd, const std::vector<Vec>& hs,
                                         const std::vector<Vec>& gs, double t, double tol = 1e-10,
                                         PropagatorOptions opt = {});

// Gamma(P0_t f)^{1/2} <= Pbar^{kappa/2}_t Gamma(f)^{1/2}, Gamma of the
// reflected space, f vanishing on the boundary.
InequalityReport sub_taming_check(const DoubledDomain& dd, const TamingMeasure& kappa, const std::vector<Vec>& fs,
                                  const std::vector<double>& ts, const CheckOptions& opt = {});

// GE1(kappa^, infinity) on the doubled space for antisymmetric lifts.
InequalityReport doubled_route_check(const DoubledDomain& dd, const TamingMeasure& kappa,
                                     const std::vector<Vec>& fs, const std::vector<double>& ts,
                                     const CheckOptions& opt = {});

}  // namespace tamelab
