#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "tamelab/errors.hpp"
#include "tamelab/examples.hpp"
#include "tamelab/kato.hpp"
#include "tamelab/verifier.hpp"

using namespace tamelab;

TEST_CASE("Khasminskii bound") {
  CHECK(khasminskii_bound(0.0) == 1.0);
  CHECK(khasminskii_bound(0.5) == doctest::Approx(2.0));
  CHECK(khasminskii_bound(0.9) == doctest::Approx(10.0));
  CHECK_THROWS_AS(khasminskii_bound(1.0), RhoOutOfRange);
  CHECK_THROWS_AS(khasminskii_bound(-0.1), RhoOutOfRange);
}

TEST_CASE("Kato profile of trivial and constant measures") {
  const auto c = build_generator(build_grid(box_spec(2, 10, 0, 1)));
  for (const auto& row : kato_profile(c, zero_measure(c), {0.01, 0.1})) CHECK(row.rho == 0.0);
  const double k = 2.5;
  const auto rows = kato_profile(c, constant_measure(c, -k), {0.01, 0.05, 0.2});
  for (const auto& row : rows) CHECK(std::abs(row.rho - k * row.t) < 1e-8);
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].rho >= rows[i - 1].rho);
}

TEST_CASE("boundary local time scales like sqrt t") {
  const auto c = build_generator(build_grid(halfplane_spec(4, 64, 1.0 / 64)));
  Vec ell = Vec::Zero(c.n());
  for (int i = 0; i < c.n(); ++i) ell[i] = c.boundary[i];
  const auto mu = boundary_measure(c, ell, "flat");
  const auto rows = kato_profile(c, mu, {0.004, 0.016});
  const double ratio = rows[0].rho / rows[1].rho;
  CHECK(ratio >= 0.45);
  CHECK(ratio <= 0.55);
}

TEST_CASE("alpha potentials") {
  const auto c = build_generator(build_grid(box_spec(2, 10, 0, 1)));
  CHECK(alpha_potential_sup(c, zero_measure(c), 3.0) == 0.0);
  CHECK(alpha_potential_sup(c, constant_measure(c, 1.5), 3.0) == doctest::Approx(0.5).epsilon(1e-10));

  const CuspDomain cd = cusp_domain(16, 0.5);
  const auto cc = build_generator(cd.grid);
  const auto mu = boundary_measure(cc, cd.ell, "cusp");
  const double a1 = alpha_potential_sup(cc, mu, 1), a10 = alpha_potential_sup(cc, mu, 10),
               a100 = alpha_potential_sup(cc, mu, 100);
  CHECK(a1 > a10);
  CHECK(a10 > a100);
}

TEST_CASE("property: resolvent classifier for bulk potentials") {
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto c = build_generator(build_grid(box_spec(2, 12, 0, 1)));
  for (int trial = 0; trial < 5; ++trial) {
    Vec k(c.n());
    for (int i = 0; i < c.n(); ++i) k[i] = u(g);
    const auto mu = bulk_measure(c, k, "random");
    double prev = kInf;
    for (int e = 0; e <= 3; ++e) {
      const double a = std::pow(10.0, e);
      const double v = alpha_potential_sup(c, mu, a);
      CHECK(v < prev);
      CHECK(a * v <= k.cwiseAbs().maxCoeff() + 1e-9);
      prev = v;
    }
    CHECK(prev < 0.01);
  }
}

TEST_CASE("surface L^p of a bounded density") {
  const GridDomain d = build_grid(box_spec(3, 6, 0, 1));
  const GridDomain f = build_grid(box_spec(3, 12, 0, 1));
  const Vec ec = Vec::Ones(d.size()), ef = Vec::Ones(f.size());
  const auto r = surface_lp_check(d, ec, f, ef, 3.0);
  CHECK(r.bounded);
  CHECK(r.kato_prediction);
  // total boundary area of the unit cube, counted face by face
  CHECK(surface_lp_integral(f, ef, 1.0) == doctest::Approx(6.0 * std::pow(12.0 / 11, 2)).epsilon(0.2));
  CHECK_FALSE(surface_lp_check(d, ec, f, ef, 1.5).kato_prediction);
}

TEST_CASE("cusp boundary L^p dichotomy") {
  for (double alpha : {0.5, 0.9}) {
    const CuspDomain a = cusp_domain(16, alpha), b = cusp_domain(32, alpha);
    const auto r = surface_lp_check(a.grid, a.ell, b.grid, b.ell, 3.0);
    CHECK(r.bounded == (alpha * 3 < 2));
    CHECK(r.kato_prediction == (alpha * 3 < 2));
  }
}

TEST_CASE("profile CSV columns") {
  const auto c = build_generator(build_grid(box_spec(1, 10, 0, 1)));
  const auto rows = kato_profile(c, constant_measure(c, 1.0), {0.1});
  const std::string path = "tamelab_profile_test.csv";
  write_profile_csv(rows, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  std::remove(path.c_str());
  CHECK(header == "t,rho,alpha,potential_sup");
}
