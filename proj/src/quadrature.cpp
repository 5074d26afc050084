#include "tamelab/quadrature.hpp"

#include <cmath>

namespace tamelab {

Vec simpson(const std::function<Vec(double)>& F, double a, double b, double rel_tol,
            int min_points, int max_points, QuadInfo* info) {
  // sample values kept in order; each refinement evaluates only new midpoints
  int intervals = 2;
  while (intervals + 1 < min_points) intervals *= 2;
  std::vector<Vec> vals(intervals + 1);
  for (int i = 0; i <= intervals; ++i) vals[i] = F(a + (b - a) * i / intervals);

  auto rule = [&](const std::vector<Vec>& v, int ni) {
    const double hh = (b - a) / ni;
    Vec s = v[0] + v[ni];
    for (int i = 1; i < ni; ++i) s += (i % 2 ? 4.0 : 2.0) * v[i];
    return Vec(s * (hh / 3.0));
  };

  Vec cur = rule(vals, intervals);
  QuadInfo qi;
  qi.points = intervals + 1;
  if (b == a) {
    qi.converged = true;
    if (info) *info = qi;
    return Vec::Zero(cur.size());
  }
  while (true) {
    if (2 * intervals + 1 > max_points) break;
    std::vector<Vec> next(2 * intervals + 1);
    for (int i = 0; i <= intervals; ++i) next[2 * i] = std::move(vals[i]);
    for (int i = 0; i < intervals; ++i) next[2 * i + 1] = F(a + (b - a) * (2 * i + 1) / (2.0 * intervals));
    intervals *= 2;
    vals = std::move(next);
    Vec nv = rule(vals, intervals);
    const double diff = (nv - cur).cwiseAbs().maxCoeff();
    const double scale = nv.cwiseAbs().maxCoeff();
    cur = nv;
    qi.points = intervals + 1;
    qi.rel_change = scale > 0 ? diff / scale : diff;
    if (diff <= rel_tol * scale || scale == 0) {
      qi.converged = true;
      break;
    }
  }
  if (info) *info = qi;
  return cur;
}

double simpson_scalar(const std::function<double(double)>& F, double a, double b, double rel_tol,
                      int min_points, int max_points, QuadInfo* info) {
  auto G = [&](double s) {
    Vec v(1);
    v[0] = F(s);
    return v;
  };
  return simpson(G, a, b, rel_tol, min_points, max_points, info)[0];
}

void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch on the Laguerre Jacobi matrix
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = 2 * i + 1;
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = i + 1;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = v0 * v0;
  }
}

}  // namespace tamelab
