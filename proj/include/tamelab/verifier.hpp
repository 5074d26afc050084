#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tamelab/taming.hpp"

namespace tamelab {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEpsGamma = 1e-14;

enum class Verdict { Pass, Fail, ReportOnly };
std::string to_string(Verdict v);

struct InequalityReport {
  std::string check_name;
  nlohmann::json parameters = nlohmann::json::object();
  double worst_margin = kInf;
  int worst_node = -1;
  int worst_test = -1;
  int worst_time = -1;
  double tolerance = 1e-8;
  bool report_only = false;
  Verdict verdict = Verdict::Pass;
  std::optional<std::pair<double, double>> refinement_trend;
  Vec node_margins;  // nodewise minimum over all cases, +inf where not compared
  nlohmann::json meta = nlohmann::json::object();
  int nan_count = 0;

  void finalize();
  bool passed() const { return verdict != Verdict::Fail; }
};

nlohmann::json to_json(const InequalityReport& r);
void write_margins_csv(const InequalityReport& r, const GeneratorContext& ctx, const std::string& path);

struct CheckOptions {
  double tol = 1e-8;          // chain-rule-free checks
  double chain_C = 1.0;       // chain-rule checks: relative margin >= -chain_C * h
  int min_quad_points = 33;
  double quad_rel_tol = 1e-8;
  int max_quad_points = 4097;
  PropagatorOptions prop;
};

// Random Gaussians smoothed by P_{h^2}, coordinate functions, and smoothed
// indicators of random balls.
std::vector<Vec> test_battery(const GeneratorContext& ctx, int n_random, std::uint64_t seed,
                              bool coordinates = true, int n_indicators = 2);
// Strictly positive battery: exp of smoothed Gaussians and shifted indicators.
std::vector<Vec> positive_battery(const GeneratorContext& ctx, int n, std::uint64_t seed);
// Nonnegative bumps: P_s of a point mass at random nodes.
std::vector<Vec> bump_battery(const GeneratorContext& ctx, int n, double s, std::uint64_t seed);

// Gradient estimate of order 1 or 2; N = kInf for the dimension-free form.
InequalityReport check_ge(const GeneratorContext& ctx, const TamingMeasure& kappa, double N, int order,
                          const std::vector<Vec>& fs, const std::vector<double>& ts,
                          const CheckOptions& opt = {});

InequalityReport check_be2(const GeneratorContext& ctx, const TamingMeasure& kappa, double N,
                           const std::vector<Vec>& fs, const std::vector<Vec>& phis,
                           const CheckOptions& opt = {});

// GE2 passing at tau implies BE2 passing at c*tau.
nlohmann::json ge_be_cross_consistency(const InequalityReport& ge, const InequalityReport& be, double c = 10.0);

InequalityReport check_poincare(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                const std::vector<Vec>& fs, double t, const CheckOptions& opt = {});

InequalityReport check_logsobolev(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                  const std::vector<Vec>& fs, double t, const CheckOptions& opt = {});

InequalityReport check_selfimprovement(const GeneratorContext& ctx, const TamingMeasure& kappa,
                                       const std::vector<Vec>& fs, double t,
                                       const std::vector<double>& alphas, const CheckOptions& opt = {});

InequalityReport check_gamma_gamma(const GeneratorContext& ctx, const TamingMeasure& kappa, double N,
                                   const std::vector<Vec>& fs, const CheckOptions& opt = {});

// |P^k_t f| <= (C_t^{qk})^{1/q} (P_t f^p)^{1/p}, f >= 0
InequalityReport check_holder(const GeneratorContext& ctx, const TamingMeasure& kappa, double q,
                              const std::vector<Vec>& fs, const std::vector<double>& ts,
                              const CheckOptions& opt = {});

enum class Phi { Euclidean, MaxPositive };
// Phi(P^k f_1..f_d) <= P^k Phi(f_1..f_d)
InequalityReport check_jensen(const GeneratorContext& ctx, const TamingMeasure& kappa, Phi phi,
                              const std::vector<std::vector<Vec>>& tuples, const std::vector<double>& ts,
                              const CheckOptions& opt = {});

// (P^k_t f)^2 <= P^{2k}_t f^2
InequalityReport check_square(const GeneratorContext& ctx, const TamingMeasure& kappa,
                              const std::vector<Vec>& fs, const std::vector<double>& ts,
                              const CheckOptions& opt = {});

}  // namespace tamelab
