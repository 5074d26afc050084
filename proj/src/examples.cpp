#include "tamelab/examples.hpp"

#include "tamelab/verifier.hpp"

#include <algorithm>
#include <cmath>

namespace tamelab {

Vec oscillating_shape(const GeneratorContext& ctx, double m, double r0, int variant) {
  Vec V(ctx.n());
  for (int i = 0; i < ctx.n(); ++i) {
    const double r = std::hypot(ctx.x[i][0], ctx.x[i][1]);
    if (r < r0) {
      V[i] = 0;
      continue;
    }
    const double s = std::sin(std::pow(r, -m));
    const double bracket = variant == 1 ? (s > 0 ? 2 * s : s) : 2 * s + 1;
    V[i] = std::pow(r, -2 - 2 * m) * bracket;
  }
  return V;
}

GeneratorContext oscillating_context(int n_nodes) {
  Weights w;
  w.scale = 0.5;
  return build_generator(build_grid(box_spec(2, n_nodes, -1, 1)), w);
}

SweepResult oscillating_sweep(const GeneratorContext& ctx, const Vec& shape, const std::vector<double>& ks,
                              double threshold, double t_max, int n_t, int bisections, PropagatorOptions opt) {
  SweepResult out;
  out.k = ks;
  for (double k : ks) out.log_sup_c.push_back(log_sup_moderateness(ctx, k * shape, t_max, n_t, opt));
  out.min_increment = kInf;
  for (size_t i = 1; i < ks.size(); ++i) {
    const double inc = out.log_sup_c[i] - out.log_sup_c[i - 1];
    out.min_increment = std::min(out.min_increment, inc);
    if (inc < -1e-9) out.monotone = false;
  }
  for (size_t i = 0; i < ks.size(); ++i) {
    if (out.log_sup_c[i] < threshold) continue;
    if (i == 0) {
      out.crossing = ks[0];
      break;
    }
    double lo = ks[i - 1], hi = ks[i];
    for (int b = 0; b < bisections; ++b) {
      const double mid = 0.5 * (lo + hi);
      if (log_sup_moderateness(ctx, mid * shape, t_max, n_t, opt) >= threshold)
        hi = mid;
      else
        lo = mid;
    }
    out.crossing = 0.5 * (lo + hi);
    break;
  }
  return out;
}

CuspDomain cusp_domain(int R, double alpha, double eps) {
  const double h = 2.0 / R;
  DomainSpec s;
  s.geometry = "cusp";
  s.dim = 3;
  const int nz = static_cast<int>(std::lround(1.5 / h)) + 1;
  s.shape = {R, R, nz};
  s.origin = {-1 + h / 2, -1 + h / 2, -0.5};
  s.spacing = {h, h, h};
  s.ends[0] = {End::Open, End::Open};
  s.ends[1] = {End::Open, End::Open};
  s.ends[2] = {End::Wall, End::Open};
  auto phi = [alpha](double r) { return r - std::pow(r, 2 - alpha); };
  const double base = eps > 0 ? phi(eps) : 0.0;
  auto rounded = [&](double r) { return eps > 0 ? phi(std::sqrt(r * r + eps * eps)) - base : phi(r); };
  s.inside = [&](const Point& p) { return p[2] > rounded(std::hypot(p[0], p[1])); };
  CuspDomain out;
  out.grid = build_grid(s);
  out.ell = Vec::Zero(out.grid.size());
  for (int k : out.grid.boundary_set) {
    const Point p = out.grid.position(k);
    const double r = std::hypot(p[0], p[1]);
    // derivatives of phi(rho(r)), rho = sqrt(r^2 + eps^2)
    const double rho = std::sqrt(r * r + eps * eps);
    if (rho == 0) continue;
    const double p1 = 1 - (2 - alpha) * std::pow(rho, 1 - alpha);
    const double p2 = -(2 - alpha) * (1 - alpha) * std::pow(rho, -alpha);
    const double r1 = r / rho, r2 = eps * eps / (rho * rho * rho);
    const double d1 = p1 * r1, d2 = p2 * r1 * r1 + p1 * r2;
    out.ell[k] = d2 / std::pow(1 + d1 * d1, 1.5);
  }
  return out;
}

std::vector<Bump> default_bumps() { return {{0.5, 0.4, 0.2}, {1.2, 0.2, 0.1}, {1.6, 0.1, 0.05}}; }

BumpDomain bump_domain(int R, const std::vector<Bump>& bumps) {
  const double h = 1.0 / R;
  double depth = 0;
  for (const auto& b : bumps) depth = std::max(depth, 2 * b.height);
  auto profile = [&](double x, double& v, double& d1, double& d2) {
    v = d1 = d2 = 0;
    for (const auto& b : bumps) {
      const double t = x - b.center;
      if (std::abs(t) > b.radius) continue;
      const double w = M_PI / b.radius;
      v += b.height * (-1 - std::cos(w * t));
      d1 += b.height * w * std::sin(w * t);
      d2 += b.height * w * w * std::cos(w * t);
    }
  };
  DomainSpec s;
  s.geometry = "halfspace-bumps";
  s.dim = 2;
  const double y0 = -depth - h / 2;
  const int ny = static_cast<int>(std::lround((1.0 - y0) / h)) + 1;
  s.shape = {2 * R, ny, 1};
  s.origin = {0, y0, 0};
  s.spacing = {h, h, 1};
  s.ends[0] = {End::Periodic, End::Periodic};
  s.ends[1] = {End::Wall, End::Open};
  s.inside = [&](const Point& p) {
    double v, d1, d2;
    profile(p[0], v, d1, d2);
    return p[1] > v;
  };
  BumpDomain out;
  out.grid = build_grid(s);
  out.ell = Vec::Zero(out.grid.size());
  for (int k : out.grid.boundary_set) {
    double v, d1, d2;
    profile(out.grid.position(k)[0], v, d1, d2);
    out.ell[k] = d2 / std::pow(1 + d1 * d1, 1.5);
  }
  return out;
}

namespace {

// Cubic Hermite on [a, b] with values va, vb and slopes sa, sb.
void hermite(double r, double a, double b, double va, double vb, double sa, double sb, double& v, double& d1,
             double& d2) {
  const double L = b - a, s = (r - a) / L;
  const double s2 = s * s, s3 = s2 * s;
  v = (2 * s3 - 3 * s2 + 1) * va + (s3 - 2 * s2 + s) * L * sa + (-2 * s3 + 3 * s2) * vb + (s3 - s2) * L * sb;
  d1 = ((6 * s2 - 6 * s) * va + (-6 * s2 + 6 * s) * vb) / L + (3 * s2 - 4 * s + 1) * sa + (3 * s2 - 2 * s) * sb;
  d2 = ((12 * s - 6) * va + (-12 * s + 6) * vb) / (L * L) + ((6 * s - 4) * sa + (6 * s - 2) * sb) / L;
}

}  // namespace

void theta_cutoff(int j, double r, double& v, double& d1, double& d2) {
  const double a = 1.0 / (3 * j), b = 1.0 / j, c = 2.0 / (3 * j);
  if (r <= a) {
    v = c;
    d1 = d2 = 0;
  } else if (r <= b) {
    hermite(r, a, b, c, b, 0, 1, v, d1, d2);
  } else if (r <= 1) {
    v = r;
    d1 = 1;
    d2 = 0;
  } else if (r <= 3) {
    hermite(r, 1, 3, 1, 2, 1, 0, v, d1, d2);
  } else {
    v = 2;
    d1 = d2 = 0;
  }
}

TimeChange nowhere_kato_timechange(const GridDomain& d, int j, double m, double l) {
  const double a = 2 + 2 * m - l;
  TimeChange out{Vec(d.size()), Vec(d.size())};
  for (int i = 0; i < d.size(); ++i) {
    const Point p = d.position(i);
    double r2 = 0;
    for (int ax = 0; ax < d.dim; ++ax) r2 += p[ax] * p[ax];
    const double r = std::sqrt(r2);
    double th, th1, th2;
    theta_cutoff(j, r, th, th1, th2);
    const double u = std::pow(th, -m), sn = std::sin(u), cs = std::cos(u);
    const double P = std::pow(th, a) * sn;
    const double P1 = a * std::pow(th, a - 1) * sn - m * std::pow(th, a - 1 - m) * cs;
    const double P2 = a * (a - 1) * std::pow(th, a - 2) * sn - m * (2 * a - 1 - m) * std::pow(th, a - 2 - m) * cs -
                      m * m * std::pow(th, a - 2 - 2 * m) * sn;
    const double g1 = P1 * th1, g2 = P2 * th1 * th1 + P1 * th2;
    // radial Laplacian; psi is flat near the origin
    const double lap = g2 + (r > 0 ? (d.dim - 1) * g1 / r : 0.0);
    out.psi[i] = P;
    out.k[i] = -(d.dim - 2) * g1 * g1 - lap;
  }
  return out;
}

Vec wiggle_boundary_density(const GeneratorContext& ctx, int truncation) {
  Vec ell = Vec::Zero(ctx.n());
  for (int k = 0; k < ctx.n(); ++k) {
    if (!ctx.boundary[k]) continue;
    const double x = ctx.x[k][0];
    for (int i = 1; i <= truncation; ++i) {
      const double s = std::ldexp(1.0, -i), c = 3 * s;
      if (x < c - s || x > c + s) continue;
      const double q = 2 * (i + 1) + 1, u = (x - c) / s;
      const double sn = std::sin(q * M_PI * u);
      ell[k] += std::cos(q * M_PI * u) / (1 + (M_PI / q) * (M_PI / q) * sn * sn) / s;
    }
  }
  return ell;
}

double total_variation(const GeneratorContext& ctx, const Vec& ell) {
  double tv = 0;
  for (int k = 0; k < ctx.n(); ++k) tv += std::abs(ell[k]) * ctx.sigma_over_m[k] * ctx.m[k];
  return tv;
}

}  // namespace tamelab
