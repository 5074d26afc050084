// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "tamelab/config.hpp"
#include "tamelab/scenarios.hpp"

using namespace tamelab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec gaussian(int n, std::mt19937_64& g) {
  std::normal_distribution<double> d;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(g);
  return v;
}

Vec uniform(int n, std::mt19937_64& g, double lo = 0, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(g);
  return v;
}

struct Outcome {
  bool pass;
  std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

const CheckRecord* find_check(const ScenarioResult& r, const std::string& tag) {
  for (const auto& c : r.checks)
    if (c.tag == tag) return &c;
  return nullptr;
}

ScenarioResult run(const std::string& name, const std::string& cfg = "") {
  auto s = default_spec(name);
  if (!cfg.empty()) apply_config(s, parse_config_text(cfg));
  validate(s);
  return run_scenario(s);
}

// 1 ------------------------------------------------------------------------
Outcome semigroup_laws() {
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, GeneratorContext>> grids;
  grids.emplace_back("2-node", make_graph(Vec::Ones(2), {{0, 1, 1.0}}));
  grids.emplace_back("1D-64 Neumann", build_generator(build_grid(box_spec(1, 64, 0, 1))));
  grids.emplace_back("1D-64 Dirichlet", build_generator(build_grid(box_spec(1, 64, 0, 1, Bc::Dirichlet))));
  grids.emplace_back("64^2 torus", build_generator(build_grid(torus_spec(2, 64))));
  grids.emplace_back("48^2 strip", build_generator(build_grid(halfplane_spec(48, 48, 1.0 / 48))));
  std::mt19937_64 g(101);
  double worst = 0;
  for (const auto& [name, c] : grids) {
    const Propagator P(c);
    for (int trial = 0; trial < 3; ++trial) {
      const double t = 0.01 + 0.05 * trial, s = 0.02;
      const Vec f = restrict_free(c, gaussian(c.n(), g)), h = restrict_free(c, gaussian(c.n(), g));
      const double fs = f.cwiseAbs().maxCoeff();
      worst = std::max(worst, (P.apply(f, t + s) - P.apply(P.apply(f, s), t)).cwiseAbs().maxCoeff() / fs);
      const double sym = std::abs(inner_m(c, P.apply(f, t), h) - inner_m(c, f, P.apply(h, t)));
      worst = std::max(worst, sym / std::sqrt(inner_m(c, f, f) * inner_m(c, h, h)));
      const Vec pos = restrict_free(c, uniform(c.n(), g));
      const Vec pp = P.apply(pos, t);
      worst = std::max(worst, std::max(0.0, -pp.minCoeff()));
      worst = std::max(worst, std::max(0.0, P.apply(restrict_free(c, Vec::Ones(c.n())), t).maxCoeff() - 1));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 60, fmt("max violation %.2e over 5 grids, %.1f s", worst, secs)};
}

// 2 ------------------------------------------------------------------------
Outcome feynman_kac() {
  const auto c = build_generator(build_grid(box_spec(2, 14, 0, 1)));
  std::mt19937_64 g(102);
  const Vec f = gaussian(c.n(), g);
  const double t = 0.07, k = 1.3, fs = f.cwiseAbs().maxCoeff();
  const Vec p = heat_apply(c, f, t);
  const double e0 = (taming_apply(c, zero_measure(c), f, t) - p).cwiseAbs().maxCoeff() / fs;
  const double ek = (taming_apply(c, constant_measure(c, k), f, t) - std::exp(-k * t) * p).cwiseAbs().maxCoeff() / fs;
  const auto box = build_generator(build_grid(box_spec(2, 12, 0, 1)));
  Vec V(box.n()), h(box.n());
  for (int i = 0; i < box.n(); ++i) {
    V[i] = 5 * box.x[i][0] * box.x[i][1];
    h[i] = std::cos(2 * box.x[i][0]) + box.x[i][1];
  }
  const Vec ref = Propagator(box, V).apply(h, 0.2);
  const double et = (trotter_apply(box, V, h, 0.2, 1024) - ref).norm() / ref.norm();
  return {e0 <= 1e-12 && ek <= 1e-10 && et <= 1e-4,
          fmt("kappa=0 %.1e, constant kappa %.1e, Trotter(1024) %.1e", e0, ek, et)};
}

// 3 ------------------------------------------------------------------------
Outcome holder_jensen() {
  std::mt19937_64 g(103);
  double worst = kInf;
  int cases = 0;
  for (const auto& c : {build_generator(build_grid(box_spec(2, 10, 0, 1))),
                        build_generator(build_grid(torus_spec(2, 10)))}) {
    int per_grid = 0;
    for (int kk = 0; kk < 10; ++kk) {
      const auto kappa = bulk_measure(c, uniform(c.n(), g, -3, 3), "random");
      std::vector<Vec> pos, fs;
      for (int j = 0; j < 5; ++j) {
        pos.push_back(uniform(c.n(), g));
        fs.push_back(gaussian(c.n(), g));
      }
      const std::vector<double> ts{0.02, 0.2};
      const double q = 1.5 + kk * 0.3;
      worst = std::min(worst, check_holder(c, kappa, q, pos, ts).worst_margin);
      std::vector<std::vector<Vec>> tup;
      for (int j = 0; j < 5; ++j) tup.push_back({fs[j], fs[(j + 1) % 5], pos[j]});
      worst = std::min(worst, check_jensen(c, kappa, Phi::Euclidean, tup, ts).worst_margin);
      per_grid += 20;
    }
    cases = std::max(cases, per_grid);
  }
  return {worst >= -1e-10, fmt("worst slack %.2e, %d cases per grid", worst, cases)};
}

// 4 ------------------------------------------------------------------------
Outcome khasminskii() {
  std::mt19937_64 g(104);
  const auto c = build_generator(build_grid(box_spec(2, 12, 0, 1)));
  const double t = 0.1;
  double worst = kInf;
  for (int trial = 0; trial < 20; ++trial) {
    Vec W = uniform(c.n(), g).array().square();
    const double target = 0.05 + 0.75 * trial / 19.0;
    W *= target / kato_rho(c, W, t);
    const double rho = kato_rho(c, W, t);
    const double C = moderateness_constant(c, bulk_measure(c, -W, "neg"), t);
    worst = std::min(worst, khasminskii_bound(rho) + 1e-8 - C);
    if (rho > 0.8 + 1e-9) return {false, fmt("rho %.3f exceeds 0.8", rho)};
  }
  return {worst >= 0, fmt("min slack 1/(1-rho) - C_t = %.3e over 20 potentials", worst)};
}

// 5 ------------------------------------------------------------------------
Outcome torus_ge2_be2() {
  const auto c = build_generator(build_grid(torus_spec(2, 20)));
  const auto fs = test_battery(c, 46, 105);  // + 2 coordinates + 2 indicators = 50
  const auto ge = check_ge(c, zero_measure(c), kInf, 2, fs, {0.05, 0.2, 1.0});
  const auto be = check_be2(c, zero_measure(c), kInf, fs, bump_battery(c, 4, c.h * c.h, 106));
  const bool consistent = ge_be_cross_consistency(ge, be).at("consistent").get<bool>();
  return {ge.worst_margin >= -1e-8 && be.worst_margin >= -1e-8 && consistent,
          fmt("GE2 worst %.2e, BE2 worst %.2e over %zu f, cross-consistent %s", ge.worst_margin, be.worst_margin,
              fs.size(), consistent ? "yes" : "no")};
}

// 6 ------------------------------------------------------------------------
Outcome poincare_logsobolev() {
  double worst = kInf;
  for (const auto& c : {build_generator(build_grid(torus_spec(2, 16))),
                        build_generator(build_grid(box_spec(1, 48, 0, 1)))}) {
    for (double t : {0.05, 0.3}) {
      worst = std::min(worst, check_poincare(c, zero_measure(c), test_battery(c, 5, 107), t).worst_margin);
      worst = std::min(worst, check_logsobolev(c, zero_measure(c), positive_battery(c, 5, 108), t).worst_margin);
    }
  }
  const auto two = make_graph(Vec::Ones(2), {{0, 1, 1.0}});
  double closed = 0;
  for (double t : {0.1, 0.7}) {
    const auto r = check_poincare(two, zero_measure(two), {(Vec(2) << 1, 0).finished()}, t);
    const double mid = 0.5 - r.meta.at("upper_worst_margin").get<double>();
    closed = std::max(closed, std::abs(mid - (1 - std::exp(-4 * t)) / (8 * t)));
  }
  return {worst >= -1e-8 && closed <= 1e-10,
          fmt("worst slack %.2e, 2-node middle term error %.1e", worst, closed)};
}

// 7 ------------------------------------------------------------------------
Outcome doubling_identity() {
  double id = 0, red = 0;
  for (const char* name : {"doubled-interval", "doubled-disk"}) {
    const auto r = run(name, "checks = [\"doubled_identity\", \"doubled_reductions\"]\n");
    for (const auto& c : r.checks) {
      if (c.report.check_name == "doubled_identity") id = std::max(id, -c.report.worst_margin);
      if (c.report.check_name == "doubled_reductions") red = std::max(red, -c.report.worst_margin);
    }
  }
  return {id <= 1e-9 && red <= 1e-10, fmt("identity error %.1e, reductions error %.1e", id, red)};
}

// 8 ------------------------------------------------------------------------
Outcome sub_taming() {
  const auto r = run("doubled-interval", "checks = [\"sub_taming\"]\n");
  const auto *a = find_check(r, "sub_taming_R32"), *b = find_check(r, "sub_taming_R64"),
             *trend = find_check(r, "sub_taming_trend");
  if (!a || !b || !trend) return {false, "missing sub-taming records"};
  const double ratio = std::min(a->report.worst_margin, 0.0) / std::min(b->report.worst_margin, -1e-300);
  const bool ok = a->report.passed() && b->report.passed() && trend->report.passed() &&
                  (b->report.worst_margin >= 0 || ratio >= 1.5);
  return {ok, fmt("margins %.4f (R32, tol %.4f), %.4f (R64, tol %.4f), shrink factor %.2f", a->report.worst_margin,
                  a->report.tolerance, b->report.worst_margin, b->report.tolerance, ratio)};
}

// 9 ------------------------------------------------------------------------
Outcome monte_carlo() {
  const auto c = build_generator(build_grid(halfplane_spec(16, 16, 1.0 / 16)));
  Vec ell = Vec::Zero(c.n()), V0(c.n());
  for (int i = 0; i < c.n(); ++i) {
    if (c.boundary[i]) ell[i] = 0.5;
    V0[i] = 2 * std::sin(3 * c.x[i][0]);
  }
  const Vec V = V0 + node_potential(c, boundary_measure(c, ell, "ell"));
  std::vector<McCase> battery;
  std::mt19937_64 g(109);
  std::uniform_int_distribution<int> pick(0, c.n() - 1);
  for (int k = 0; k < 8; ++k) {
    Vec f(c.n());
    for (int i = 0; i < c.n(); ++i) f[i] = std::cos((k + 1) * c.x[i][0]) + c.x[i][1];
    battery.push_back({f, pick(g), k % 2 ? 0.02 : 0.05});
  }
  WalkerConfig cfg;
  cfg.n_walkers = 100000;
  cfg.seed = 110;
  const auto r = mc_vs_matrix(c, V, battery, cfg);
  const int saved = omp_get_max_threads();
  cfg.n_walkers = 20000;
  omp_set_num_threads(1);
  const auto a = mc_feynman_kac(c, V, battery[0].f, battery[0].x0, 0.05, cfg);
  omp_set_num_threads(8);
  const auto b = mc_feynman_kac(c, V, battery[0].f, battery[0].x0, 0.05, cfg);
  omp_set_num_threads(saved);
  const bool det = a.mean == b.mean && a.stderr_ == b.stderr_;
  return {r.passed() && det, fmt("%.0f%% of %zu z-scores <= 3.5 on %d nodes, 1 vs 8 threads bit-exact %s",
                                 100 * r.meta.at("fraction_within").get<double>(), battery.size(), c.n(),
                                 det ? "yes" : "no")};
}

// 10 -----------------------------------------------------------------------
Outcome oscillating() {
  const auto r = run("oscillating-potential");
  bool ok = !r.checks.empty();
  double crossing = -1;
  for (const auto& c : r.checks) {
    ok = ok && c.report.verdict == Verdict::Pass;
    if (c.report.check_name == "sweep_crossing") crossing = c.report.meta.at("crossing").get<double>();
  }
  return {ok, fmt("log C_1 nondecreasing in k, crossing k = %.4f in [%.4f, %.4f]", crossing, 1.0 / 16, 27.0 / 8)};
}

// 11 -----------------------------------------------------------------------
Outcome cusp() {
  bool ok = true;
  std::string d;
  for (double alpha : {0.5, 0.9}) {
    const CuspDomain a = cusp_domain(16, alpha), b = cusp_domain(32, alpha);
    const auto r = surface_lp_check(a.grid, a.ell, b.grid, b.ell, 3.0);
    const bool want = alpha * 3 < 2;
    ok = ok && r.bounded == want && r.kato_prediction == want;
    d += fmt("alpha %.1f: growth %.2f -> %s; ", alpha, r.growth_exponent, r.bounded ? "bounded" : "unbounded");
  }
  return {ok, d.substr(0, d.size() - 2)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"semigroup laws on five reference grids", semigroup_laws},
      {"Feynman-Kac identities", feynman_kac},
      {"Holder and Jensen nodewise", holder_jensen},
      {"Khasminskii bound", khasminskii},
      {"GE2/BE2 on the flat torus", torus_ge2_be2},
      {"local Poincare and log-Sobolev", poincare_logsobolev},
      {"doubling identity and reductions", doubling_identity},
      {"sub-taming with refinement trend", sub_taming},
      {"Monte Carlo oracle", monte_carlo},
      {"oscillating-potential sweep", oscillating},
      {"cusp surface L^p dichotomy", cusp},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2zu  %-40s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures;
}
