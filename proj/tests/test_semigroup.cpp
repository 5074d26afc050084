#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "tamelab/errors.hpp"
#include "tamelab/quadrature.hpp"
#include "tamelab/semigroup.hpp"

using namespace tamelab;

namespace {

GeneratorContext two_point() { return make_graph(Vec::Ones(2), {{0, 1, 1.0}}); }

Vec random_vec(int n, std::mt19937_64& g) {
  std::normal_distribution<double> d;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(g);
  return v;
}

// e^{tA} on the free nodes via Eigen's Pade-based matrix exponential.
Vec expm_oracle(const GeneratorContext& c, const Vec& V, const Vec& f, double t) {
  const Eigen::MatrixXd A = dense_operator(c, V);
  const Eigen::MatrixXd E = (t * A).exp();
  Vec ff(c.n_free());
  for (int k = 0; k < c.n_free(); ++k) ff[k] = f[c.free_nodes[k]];
  const Vec u = E * ff;
  Vec out = Vec::Zero(c.n());
  for (int k = 0; k < c.n_free(); ++k) out[c.free_nodes[k]] = u[k];
  return out;
}

GeneratorContext dirichlet_disk(int n) {
  auto s = box_spec(2, n, -1, 1, Bc::Dirichlet);
  s.inside = [](const Point& p) { return p[0] * p[0] + p[1] * p[1] <= 0.9; };
  return build_generator(build_grid(s));
}

}  // namespace

TEST_CASE("two-point heat semigroup") {
  const auto c = two_point();
  const Vec f = (Vec(2) << 1, 0).finished();
  for (Method m : {Method::DenseExpm, Method::Krylov}) {
    const Vec u = heat_apply(c, f, std::log(2.0) / 2, m);
    CHECK(u[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(heat_apply(c, f, 0.0, m) == f);
  }
  CHECK_THROWS_AS(heat_apply(c, f, -1.0), NegativeTime);
}

TEST_CASE("constants are invariant on Neumann grids") {
  const auto c = build_generator(build_grid(box_spec(2, 20, 0, 1)));
  const Vec one = Vec::Ones(c.n());
  for (Method m : {Method::DenseExpm, Method::Krylov, Method::CrankNicolson})
    CHECK((heat_apply(c, one, 0.3, m) - one).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("resolvent") {
  const auto c = two_point();
  const Vec u = resolvent_apply(c, (Vec(2) << 1, 0).finished(), 1.0);
  CHECK(u[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(resolvent_apply(c, u, 0.0), SingularSystem);

  const auto box = build_generator(build_grid(box_spec(2, 12, 0, 1)));
  const Vec r = resolvent_apply(box, Vec::Ones(box.n()), 2.5);
  CHECK((r.array() - 0.4).abs().maxCoeff() < 1e-12);

  std::mt19937_64 g(1);
  const auto d = dirichlet_disk(16);
  const Vec gv = restrict_free(d, random_vec(d.n(), g));
  const Vec f = 1.3 * gv - apply_L(d, gv);
  CHECK((resolvent_apply(d, f, 1.3) - gv).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("conservativeness defect") {
  CHECK(conservativeness_defect(build_generator(build_grid(torus_spec(2, 16))), 1.0) <= 1e-9);

  auto one_end = box_spec(1, 20, 0, 1);
  one_end.bc_at = [](const Point& p) { return p[0] < 0.5 ? Bc::Dirichlet : Bc::Neumann; };
  CHECK(conservativeness_defect(build_generator(build_grid(one_end)), 0.1) > 0);

  const auto c = build_generator(build_grid(box_spec(1, 64, 0, 1, Bc::Dirichlet)));
  const Vec P1 = expm_oracle(c, Vec(), Vec::Ones(c.n()), 0.1);
  double want = 0;
  for (int i : c.free_nodes) want = std::max(want, 1 - P1[i]);
  const double got = conservativeness_defect(c, 0.1);
  CHECK(std::abs(got - want) < 1e-8);
  CHECK(got <= 1.0);
}

TEST_CASE("bottom of the spectrum") {
  const auto box = build_generator(build_grid(box_spec(2, 10, 0, 1)));
  CHECK(std::abs(lambda0(box).value) < 1e-9);
  const double c = 0.8;
  const auto r = lambda0(box, Vec::Constant(box.n(), c));
  CHECK(r.value == doctest::Approx(c).epsilon(1e-9));
  CHECK(r.residual <= 1e-8);

  const auto tp = two_point();
  for (double v : {0.1, 1.0, 5.0}) {
    const double want = (v + 2 - std::sqrt(v * v + 4)) / 2;
    CHECK(lambda0(tp, (Vec(2) << v, 0).finished()).value == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("property: semigroup law and symmetry") {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> ut(0.001, 0.3);
  const auto d = dirichlet_disk(20);
  const auto V = [&] {
    Vec v(d.n());
    for (int i = 0; i < d.n(); ++i) v[i] = std::sin(3 * d.x[i][0]) - 0.5;
    return v;
  }();
  const Propagator P(d, V);
  for (int trial = 0; trial < 20; ++trial) {
    const double t = ut(g), s = ut(g);
    const Vec f = restrict_free(d, random_vec(d.n(), g)), h = restrict_free(d, random_vec(d.n(), g));
    const double scale = f.cwiseAbs().maxCoeff() * std::exp(0.5 * (t + s) * 2);
    CHECK((P.apply(f, t + s) - P.apply(P.apply(f, s), t)).cwiseAbs().maxCoeff() <= 1e-9 * scale);
    CHECK(std::abs(inner_m(d, P.apply(f, t), h) - inner_m(d, f, P.apply(h, t))) <=
          1e-9 * std::sqrt(inner_m(d, f, f) * inner_m(d, h, h)) * std::exp(t));
  }
}

TEST_CASE("property: positivity and sub-Markov bound") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0, 1);
  const auto d = dirichlet_disk(18);
  for (int trial = 0; trial < 20; ++trial) {
    Vec f(d.n());
    for (int i = 0; i < d.n(); ++i) f[i] = u(g);
    const Vec p = heat_apply(d, f, 0.02 + 0.01 * trial);
    CHECK(p.minCoeff() >= -1e-12);
    CHECK(p.maxCoeff() <= f.maxCoeff() + 1e-12);
  }
}

TEST_CASE("property: Krylov, dense and Pade agree") {
  std::mt19937_64 g(4);
  const auto d = dirichlet_disk(24);
  Vec V(d.n());
  for (int i = 0; i < d.n(); ++i) V[i] = 4 * d.x[i][1];
  PropagatorOptions kry, den;
  kry.method = Method::Krylov;
  den.method = Method::DenseExpm;
  const Propagator Pk(d, V, kry), Pd(d, V, den);
  for (double t : {0.001, 0.05, 0.5}) {
    const Vec f = restrict_free(d, random_vec(d.n(), g));
    const Vec a = Pk.apply(f, t), b = Pd.apply(f, t), c = expm_oracle(d, V, f, t);
    const double s = c.cwiseAbs().maxCoeff();
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8 * s);
    CHECK((b - c).cwiseAbs().maxCoeff() <= 1e-8 * s);
  }
}

TEST_CASE("Crank-Nicolson converges to the exponential on smooth data") {
  const auto c = build_generator(build_grid(box_spec(1, 65, 0, 1)));
  Vec f(c.n());
  for (int i = 0; i < c.n(); ++i) f[i] = std::cos(M_PI * c.x[i][0]);
  const Vec ref = heat_apply(c, f, 0.1, Method::DenseExpm);
  const Vec cn = heat_apply(c, f, 0.1, Method::CrankNicolson);
  CHECK((cn - ref).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Laplace transform links the resolvent and the semigroup") {
  const auto c = build_generator(build_grid(box_spec(1, 40, 0, 1)));
  std::mt19937_64 g(5);
  Vec f = random_vec(c.n(), g);
  f = heat_apply(c, f, 0.01);
  const double alpha = 20;
  std::vector<double> x, w;
  gauss_laguerre(40, x, w);
  const Propagator P(c);
  Vec acc = Vec::Zero(c.n());
  // int e^{-alpha t} P_t f dt = (1/alpha) int e^{-s} P_{s/alpha} f ds
  for (size_t i = 0; i < x.size(); ++i) acc += w[i] / alpha * P.apply(f, x[i] / alpha);
  const Vec r = resolvent_apply(c, f, alpha);
  CHECK((acc - r).cwiseAbs().maxCoeff() <= 1e-5 * r.cwiseAbs().maxCoeff());
}

TEST_CASE("method names round trip") {
  for (Method m : {Method::Auto, Method::DenseExpm, Method::Krylov, Method::CrankNicolson})
    CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("rk4"), ConfigParse);
}
