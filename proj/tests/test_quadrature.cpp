#include <cmath>

#include "doctest.h"
#include "tamelab/quadrature.hpp"

using namespace tamelab;

TEST_CASE("Simpson is exact on cubics") {
  QuadInfo info;
  const double v = simpson_scalar([](double x) { return 4 * x * x * x - x + 2; }, -1, 2, 1e-12, 3, 4097, &info);
  CHECK(v == doctest::Approx(4 * (16 - 1) / 4.0 - (4 - 1) / 2.0 + 6).epsilon(1e-14));
  CHECK(info.converged);
}

TEST_CASE("Simpson on a smooth vector integrand") {
  QuadInfo info;
  const Vec v = simpson(
      [](double s) {
        Vec out(2);
        out << std::exp(-s), std::cos(3 * s);
        return out;
      },
      0, 1.5, 1e-10, 3, 4097, &info);
  CHECK(v[0] == doctest::Approx(1 - std::exp(-1.5)).epsilon(1e-9));
  CHECK(v[1] == doctest::Approx(std::sin(4.5) / 3).epsilon(1e-9));
  CHECK(info.converged);
  CHECK(info.points <= 4097);
}

TEST_CASE("Simpson reports non-convergence at the cap") {
  QuadInfo info;
  simpson_scalar([](double x) { return std::sin(1.0 / (x + 1e-4)); }, 0, 1, 1e-12, 3, 65, &info);
  CHECK_FALSE(info.converged);
  CHECK(info.points == 65);
}

TEST_CASE("Simpson honours the minimum point count") {
  QuadInfo info;
  simpson_scalar([](double) { return 1.0; }, 0, 1, 1e-8, 33, 4097, &info);
  CHECK(info.points >= 33);
}

TEST_CASE("Gauss-Laguerre integrates monomials against e^-x") {
  std::vector<double> x, w;
  gauss_laguerre(12, x, w);
  REQUIRE(x.size() == 12);
  double fact = 1;
  for (int k = 0; k < 20; ++k) {
    if (k > 0) fact *= k;
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
    CHECK(s == doctest::Approx(fact).epsilon(1e-10));
  }
  for (double xi : x) CHECK(xi > 0);
}
