#include <omp.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "tamelab/errors.hpp"
#include "tamelab/montecarlo.hpp"

using namespace tamelab;

namespace {

GeneratorContext path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0 + 0.1 * i});
  return make_graph(Vec::Ones(n), e);
}

WalkerConfig walkers(long n, std::uint64_t seed) {
  WalkerConfig c;
  c.n_walkers = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("constant function without potential") {
  const auto c = path(6);
  const auto e = mc_feynman_kac(c, Vec(), Vec::Ones(c.n()), 2, 0.7, walkers(2000, 1));
  CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.stderr_ == 0.0);
  CHECK(e.n_effective == 2000);
}

TEST_CASE("constant potential multiplies by e^{-ct}") {
  const auto c = path(6);
  const double k = 0.9, t = 0.4;
  Vec f(c.n());
  for (int i = 0; i < c.n(); ++i) f[i] = i * i;
  const auto a = mc_feynman_kac(c, Vec(), f, 1, t, walkers(5000, 2));
  const auto b = mc_feynman_kac(c, Vec::Constant(c.n(), k), f, 1, t, walkers(5000, 2));
  CHECK(b.mean == doctest::Approx(std::exp(-k * t) * a.mean).epsilon(1e-12));
  const auto one = mc_feynman_kac(c, Vec::Constant(c.n(), k), Vec::Ones(c.n()), 1, t, walkers(100, 3));
  CHECK(one.mean == doctest::Approx(std::exp(-k * t)).epsilon(1e-12));
}

TEST_CASE("two-point Feynman-Kac within three standard errors") {
  const auto c = make_graph(Vec::Ones(2), {{0, 1, 1.0}});
  const double v = 1.5, t = 0.5;
  Eigen::Matrix2d A;
  A << -1 - v, 1, 1, -1;
  const Eigen::Matrix2d E = (t * A).exp();
  const Vec f = (Vec(2) << 1.0, 2.0).finished();
  const Vec V = (Vec(2) << v, 0).finished();
  for (int x0 : {0, 1}) {
    const double want = (E * f)[x0];
    const auto e = mc_feynman_kac(c, V, f, x0, t, walkers(100000, 4 + x0));
    CHECK(e.stderr_ > 0);
    CHECK(std::abs(e.mean - want) <= 3 * e.stderr_);
  }
}

TEST_CASE("seed determinism across thread counts") {
  const auto c = build_generator(build_grid(box_spec(2, 10, 0, 1)));
  Vec V(c.n()), f(c.n());
  for (int i = 0; i < c.n(); ++i) {
    V[i] = 3 * c.x[i][0];
    f[i] = std::cos(3 * c.x[i][1]);
  }
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = mc_feynman_kac(c, V, f, 7, 0.05, walkers(20000, 9));
  omp_set_num_threads(8);
  const auto b = mc_feynman_kac(c, V, f, 7, 0.05, walkers(20000, 9));
  omp_set_num_threads(saved);
  const auto s = mc_feynman_kac_serial(c, V, f, 7, 0.05, walkers(20000, 9));
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
  CHECK(a.mean == s.mean);
  CHECK(a.stderr_ == s.stderr_);
}

TEST_CASE("standard error halves when the walker count quadruples") {
  const auto c = path(8);
  Vec f(c.n());
  for (int i = 0; i < c.n(); ++i) f[i] = i;
  const auto a = mc_feynman_kac(c, Vec(), f, 3, 0.5, walkers(4000, 11));
  const auto b = mc_feynman_kac(c, Vec(), f, 3, 0.5, walkers(16000, 12));
  const double ratio = a.stderr_ / b.stderr_;
  CHECK(ratio >= 2 / 1.5);
  CHECK(ratio <= 2 * 1.5);
}

TEST_CASE("holding times are exponential with rate -L_xx") {
  const auto c = path(5);
  for (int x : {0, 2}) {
    const double rate = -Eigen::MatrixXd(c.L)(x, x);
    const auto [mean, se] = mc_holding_time(c, x, 50000, 13 + x);
    CHECK(std::abs(mean - 1 / rate) <= 2 * se);
  }
}

TEST_CASE("euler-split refuses steps above h^2") {
  const auto c = build_generator(build_grid(box_spec(1, 11, 0, 1)));
  WalkerConfig cfg = walkers(10, 1);
  cfg.scheme = Scheme::EulerSplit;
  cfg.dt = 2 * c.h * c.h;
  CHECK_THROWS_AS(mc_feynman_kac(c, Vec(), Vec::Ones(c.n()), 3, 0.1, cfg), StepTooLarge);
  CHECK(parse_scheme(to_string(Scheme::EulerSplit)) == Scheme::EulerSplit);
  CHECK_THROWS_AS(parse_scheme("leapfrog"), ConfigParse);
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1001);
  for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  CHECK(pairwise_sum(v.data(), static_cast<long>(v.size())) == 500500.0);
  std::mt19937_64 g(14);
  std::uniform_real_distribution<double> u(-1, 1);
  long double ref = 0;
  for (auto& x : v) {
    x = u(g);
    ref += x;
  }
  CHECK(std::abs(pairwise_sum(v.data(), static_cast<long>(v.size())) - static_cast<double>(ref)) < 1e-12);
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
}

TEST_CASE("Monte Carlo agrees with the matrix path on an 8-node chain") {
  const auto c = path(8);
  Vec V(c.n());
  for (int i = 0; i < c.n(); ++i) V[i] = 0.3 * i - 0.5;
  std::vector<McCase> battery;
  for (int x0 : {0, 3, 7})
    for (double t : {0.1, 0.5}) {
      Vec f(c.n());
      for (int i = 0; i < c.n(); ++i) f[i] = std::sin(i + x0);
      battery.push_back({f, x0, t});
    }
  const auto r = mc_vs_matrix(c, V, battery, walkers(20000, 15));
  CHECK(r.passed());
  CHECK(r.meta.at("fraction_within").get<double>() >= 0.99);
}
