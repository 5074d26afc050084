#pragma once

#include <string>
#include <vector>

#include "tamelab/semigroup.hpp"

namespace tamelab {

// kappa = k m + ell sigma, scaled by p.
struct TamingMeasure {
  Vec k;
  Vec ell;
  double p = 1.0;
  std::string id = "zero";
};

TamingMeasure zero_measure(const GeneratorContext& ctx);
TamingMeasure constant_measure(const GeneratorContext& ctx, double c);
TamingMeasure bulk_measure(const GeneratorContext& ctx, const Vec& k, const std::string& id);
TamingMeasure boundary_measure(const GeneratorContext& ctx, const Vec& ell, const std::string& id);
TamingMeasure scaled(const TamingMeasure& kappa, double p);
void validate(const GeneratorContext& ctx, const TamingMeasure& kappa);

Vec node_potential(const GeneratorContext& ctx, const TamingMeasure& kappa);

double energy_perturbed(const GeneratorContext& ctx, const Vec& f, const TamingMeasure& kappa);

Vec taming_apply(const GeneratorContext& ctx, const TamingMeasure& kappa, const Vec& f, double t,
                 PropagatorOptions opt = {});

double moderateness_constant(const Propagator& P, double t);
double moderateness_constant(const GeneratorContext& ctx, const TamingMeasure& kappa, double t,
                             PropagatorOptions opt = {});

// table[i][j] = C_{t_j}^{p_i kappa}
std::vector<std::vector<double>> moderateness_sweep(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                                    const std::vector<double>& t_grid,
                                                    const std::vector<double>& p_grid,
                                                    PropagatorOptions opt = {});

// log of max_{t in {0, dt, ..., t_max}} C_t for the potential V, overflow safe.
double log_sup_moderateness(const GeneratorContext& ctx, const Vec& V, double t_max, int n_t,
                            PropagatorOptions opt = {});

// (e^{(t/n)L} e^{-(t/n)V})^n f
Vec trotter_apply(const GeneratorContext& ctx, const Vec& V, const Vec& f, double t, int n,
                  PropagatorOptions opt = {});

// Per-node table from CSV rows "node-index,value" (header line optional).
Vec read_node_table(const std::string& path, int n);

}  // namespace tamelab
