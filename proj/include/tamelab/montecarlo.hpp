#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tamelab/verifier.hpp"

namespace tamelab {

enum class Scheme { CtmcExact, EulerSplit };
Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);

struct WalkerConfig {
  long n_walkers = 100000;
  double dt = 0;  // euler-split only; 0 means h^2
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::CtmcExact;
};

struct WalkEstimate {
  double mean = 0;
  double stderr_ = 0;
  double log_mean = 0;  // log |mean|, meaningful when log_domain
  long n_effective = 0;  // walkers alive at time t
  double elapsed = 0;    // seconds
  bool log_domain = false;
  std::uint64_t seed = 0;
  long n_walkers = 0;
};

nlohmann::json to_json(const WalkEstimate& e);

// Monte Carlo estimate of e^{t(L-V)} f (x0). V is the node potential, so a
// boundary density contributes l*sigma/m per unit of occupation time at
// boundary nodes, the same object the matrix path uses.
WalkEstimate mc_feynman_kac(const GeneratorContext& ctx, const Vec& V, const Vec& f, int x0, double t,
                            const WalkerConfig& cfg);
WalkEstimate mc_feynman_kac(const GeneratorContext& ctx, const TamingMeasure& kappa, const Vec& f, int x0,
                            double t, const WalkerConfig& cfg);
// Single thread, same values bit for bit.
WalkEstimate mc_feynman_kac_serial(const GeneratorContext& ctx, const Vec& V, const Vec& f, int x0, double t,
                                   const WalkerConfig& cfg);

struct ModeratenessEstimate {
  WalkEstimate best;
  int argmax = -1;
  std::vector<WalkEstimate> per_start;
};

ModeratenessEstimate mc_moderateness(const GeneratorContext& ctx, const Vec& V, double t,
                                     const std::vector<int>& starts, const WalkerConfig& cfg);

struct McCase {
  Vec f;
  int x0 = 0;
  double t = 0;
};

// z = |mc - matrix| / stderr per case; passes when >= 99% have |z| <= 3.5.
InequalityReport mc_vs_matrix(const GeneratorContext& ctx, const Vec& V, const std::vector<McCase>& battery,
                              const WalkerConfig& cfg, PropagatorOptions opt = {});

// Empirical mean holding time at x (ctmc-exact), with its standard error.
std::pair<double, double> mc_holding_time(const GeneratorContext& ctx, int x, long n, std::uint64_t seed);

// Fixed-order pairwise sum.
double pairwise_sum(const double* v, long n);

}  // namespace tamelab
