#include "tamelab/semigroup.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "tamelab/errors.hpp"

namespace tamelab {

Method parse_method(const std::string& s) {
  if (s == "auto") return Method::Auto;
  if (s == "dense-expm" || s == "dense") return Method::DenseExpm;
  if (s == "krylov") return Method::Krylov;
  if (s == "crank-nicolson" || s == "cn") return Method::CrankNicolson;
  throw ConfigParse("unknown method '" + s + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::DenseExpm: return "dense-expm";
    case Method::Krylov: return "krylov";
    case Method::CrankNicolson: return "crank-nicolson";
  }
  return "?";
}

struct Propagator::CnCache {
  std::mutex mu;
  std::map<double, std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>> lhs;
};

Eigen::SparseMatrix<double> symmetric_operator(const GeneratorContext& c, const Vec& V) {
  const int nf = c.n_free();
  std::vector<Eigen::Triplet<double>> trip;
  for (int a = 0; a < nf; ++a) {
    const int i = c.free_nodes[a];
    double diag = 0;
    for (int p = c.adj_ptr[i]; p < c.adj_ptr[i + 1]; ++p) {
      const int j = c.adj_idx[p];
      diag += c.adj_w[p];
      if (!c.dirichlet[j]) trip.emplace_back(a, c.free_pos[j], c.adj_w[p] / std::sqrt(c.m[i] * c.m[j]));
    }
    double d = -diag / c.m[i];
    if (V.size()) d -= V[i];
    trip.emplace_back(a, a, d);
  }
  Eigen::SparseMatrix<double> S(nf, nf);
  S.setFromTriplets(trip.begin(), trip.end());
  S.makeCompressed();
  return S;
}

Eigen::MatrixXd dense_operator(const GeneratorContext& c, const Vec& V) {
  const int nf = c.n_free();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nf, nf);
  for (int a = 0; a < nf; ++a) {
    const int i = c.free_nodes[a];
    double diag = 0;
    for (int p = c.adj_ptr[i]; p < c.adj_ptr[i + 1]; ++p) {
      const int j = c.adj_idx[p];
      diag += c.adj_w[p];
      if (!c.dirichlet[j]) A(a, c.free_pos[j]) += c.adj_w[p] / c.m[i];
    }
    A(a, a) -= diag / c.m[i];
    if (V.size()) A(a, a) -= V[i];
  }
  return A;
}

Propagator::Propagator(const GeneratorContext& ctx, const Vec& V, PropagatorOptions opt)
    : ctx_(&ctx), V_(V), opt_(opt), cn_(std::make_shared<CnCache>()) {
  if (V_.size() && V_.size() != ctx.n()) throw SolverDivergence("potential has wrong length");
  if (V_.size() && !V_.allFinite()) throw SolverDivergence("potential not finite");
  const int nf = ctx.n_free();
  sqrt_m_.resize(nf);
  for (int a = 0; a < nf; ++a) sqrt_m_[a] = std::sqrt(ctx.m[ctx.free_nodes[a]]);
  S_ = symmetric_operator(ctx, V_);
  method_ = opt.method;
  if (method_ == Method::Auto) method_ = nf <= opt.dense_limit ? Method::DenseExpm : Method::Krylov;
  if (method_ == Method::DenseExpm) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(S_)};
    if (es.info() != Eigen::Success) throw SolverDivergence("eigendecomposition failed");
    Q_ = es.eigenvectors();
    lam_ = es.eigenvalues();
  }
}

Eigen::VectorXd Propagator::to_sym(const Vec& f) const {
  if (f.size() != ctx_->n()) throw SolverDivergence("function has wrong length");
  Eigen::VectorXd u(ctx_->n_free());
  for (int a = 0; a < u.size(); ++a) u[a] = sqrt_m_[a] * f[ctx_->free_nodes[a]];
  return u;
}

Vec Propagator::from_sym(const Eigen::VectorXd& u, double factor) const {
  Vec f = Vec::Zero(ctx_->n());
  for (int a = 0; a < u.size(); ++a) f[ctx_->free_nodes[a]] = factor * u[a] / sqrt_m_[a];
  return f;
}

Vec Propagator::apply(const Vec& f, double t) const {
  double logs = 0;
  Vec out = apply_scaled(f, t, logs);
  if (logs != 0) out *= std::exp(logs);
  return out;
}

Vec Propagator::apply_scaled(const Vec& f, double t, double& log_scale) const {
  if (t < 0) throw NegativeTime("t = " + std::to_string(t));
  Eigen::VectorXd u = to_sym(f);
  log_scale = 0;
  if (t == 0 || u.size() == 0) return from_sym(u, 1.0);
  switch (method_) {
    case Method::DenseExpm: dense(u, t, log_scale); break;
    case Method::Krylov: krylov(u, t, log_scale); break;
    case Method::CrankNicolson: crank_nicolson(u, t, log_scale); break;
    case Method::Auto: break;
  }
  if (!u.allFinite()) throw SolverDivergence("non-finite semigroup value");
  return from_sym(u, 1.0);
}

void Propagator::dense(Eigen::VectorXd& u, double t, double& logs) const {
  const double top = lam_.maxCoeff();
  // only renormalise when growth could overflow
  const double shift = t * top > 600 ? top : 0.0;
  Eigen::VectorXd c = Q_.transpose() * u;
  for (int i = 0; i < c.size(); ++i) c[i] *= std::exp(t * (lam_[i] - shift));
  u = Q_ * c;
  logs += t * shift;
}

void Propagator::krylov(Eigen::VectorXd& u, double t, double& logs) const {
  const int n = static_cast<int>(u.size());
  const int kmax = std::min(opt_.krylov_dim, n);
  Eigen::MatrixXd Vb(n, kmax + 1);
  double remaining = t;
  double tau = t;
  int guard = 0;
  while (remaining > 0) {
    if (++guard > 1000000) throw SolverDivergence("krylov substep count exploded");
    const double beta0 = u.norm();
    if (beta0 == 0) return;
    Vb.col(0) = u / beta0;
    std::vector<double> alpha, beta;
    int k = 0;
    bool happy = false;
    for (int j = 0; j < kmax; ++j) {
      Eigen::VectorXd w = S_ * Vb.col(j);
      const double aj = Vb.col(j).dot(w);
      alpha.push_back(aj);
      // full reorthogonalisation, twice
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd proj = Vb.leftCols(j + 1).transpose() * w;
        w -= Vb.leftCols(j + 1) * proj;
      }
      const double bj = w.norm();
      k = j + 1;
      beta.push_back(bj);
      if (bj <= 1e-13 * std::abs(aj) + 1e-300 || k == n) {
        happy = true;
        break;
      }
      Vb.col(j + 1) = w / bj;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd& th = es.eigenvalues();
    const Eigen::MatrixXd& Z = es.eigenvectors();
    const double top = th.maxCoeff();
    tau = happy ? remaining : std::min(tau, remaining);
    Eigen::VectorXd y;
    double shift = 0;
    while (true) {
      shift = tau * top > 50 ? top : 0.0;
      Eigen::VectorXd c = Z.row(0).transpose();
      for (int i = 0; i < k; ++i) c[i] *= std::exp(tau * (th[i] - shift));
      y = Z * c;
      if (happy) break;
      const double err = tau * beta[k - 1] * std::abs(y[k - 1]);
      if (err <= opt_.krylov_tol * y.norm()) break;
      tau *= 0.5;
      if (tau < 1e-300) throw SolverDivergence("krylov step underflow");
    }
    u = Vb.leftCols(k) * y;
    const double s = u.cwiseAbs().maxCoeff();
    logs += std::log(beta0) + tau * shift;
    if (s > 0) {
      u /= s;
      logs += std::log(s);
    }
    remaining -= tau;
    if (remaining < 1e-15 * t) remaining = 0;
    tau *= 1.5;
  }
  // undo normalisation unless the caller wants the scaled vector
  if (std::abs(logs) < 600) {
    u *= std::exp(logs);
    logs = 0;
  }
}

void Propagator::crank_nicolson(Eigen::VectorXd& u, double t, double& logs) const {
  int steps = opt_.cn_steps;
  if (steps <= 0) {
    const double dt0 = ctx_->h * ctx_->h / 2;
    steps = static_cast<int>(std::min(1e5, std::ceil(t / dt0)));
    steps = std::max(steps, 1);
  }
  const double dt = t / steps;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver;
  {
    std::lock_guard<std::mutex> lock(cn_->mu);
    auto it = cn_->lhs.find(dt);
    if (it == cn_->lhs.end()) {
      Eigen::SparseMatrix<double> I(S_.rows(), S_.cols());
      I.setIdentity();
      Eigen::SparseMatrix<double> lhs = I - 0.5 * dt * S_;
      solver = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(lhs);
      if (solver->info() != Eigen::Success) throw SolverDivergence("Crank-Nicolson factorisation failed");
      cn_->lhs[dt] = solver;
    } else {
      solver = it->second;
    }
  }
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd rhs = u + 0.5 * dt * (S_ * u);
    u = solver->solve(rhs);
    if (solver->info() != Eigen::Success) throw SolverDivergence("Crank-Nicolson solve failed");
    const double mx = u.cwiseAbs().maxCoeff();
    if (mx > 1e100 || (mx < 1e-100 && mx > 0)) {
      u /= mx;
      logs += std::log(mx);
    }
  }
  if (logs != 0 && std::abs(logs) < 600) {
    u *= std::exp(logs);
    logs = 0;
  }
}

Vec heat_apply(const GeneratorContext& ctx, const Vec& f, double t, Method method, int cn_steps) {
  if (t < 0) throw NegativeTime("t = " + std::to_string(t));
  PropagatorOptions o;
  o.method = method;
  o.cn_steps = cn_steps;
  return Propagator(ctx, Vec(), o).apply(f, t);
}

Vec resolvent_apply(const GeneratorContext& c, const Vec& f, double alpha, const Vec& V) {
  if (!(alpha > 0)) throw SingularSystem("alpha must be positive");
  const int nf = c.n_free();
  Eigen::SparseMatrix<double> S = symmetric_operator(c, V);
  Eigen::SparseMatrix<double> I(nf, nf);
  I.setIdentity();
  Eigen::SparseMatrix<double> A = alpha * I - S;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw SingularSystem("factorisation failed");
  Eigen::VectorXd b(nf);
  for (int a = 0; a < nf; ++a) b[a] = std::sqrt(c.m[c.free_nodes[a]]) * f[c.free_nodes[a]];
  Eigen::VectorXd u = solver.solve(b);
  if (solver.info() != Eigen::Success || !u.allFinite()) throw SingularSystem("solve failed");
  Vec out = Vec::Zero(c.n());
  for (int a = 0; a < nf; ++a) out[c.free_nodes[a]] = u[a] / std::sqrt(c.m[c.free_nodes[a]]);
  return out;
}

double conservativeness_defect(const GeneratorContext& ctx, double t, Method method) {
  if (ctx.n_free() == 0) return 1.0;
  const Vec one = Vec::Ones(ctx.n());
  const Vec p = heat_apply(ctx, one, t, method);
  double d = 0;
  for (int i : ctx.free_nodes) d = std::max(d, 1.0 - p[i]);
  return std::clamp(d, 0.0, 1.0);
}

namespace {

struct InvIter {
  double value = 0, residual = 0;
  int iterations = 0;
  Eigen::VectorXd v;
  bool converged = false;
};

InvIter inverse_iteration(const Eigen::SparseMatrix<double>& B, double shift,
                          const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& solver,
                          const Eigen::VectorXd* deflate, double tol, int max_iter) {
  const int n = static_cast<int>(B.rows());
  InvIter r;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  // deterministic, non-symmetric start so that symmetric modes are not missed
  for (int i = 0; i < n; ++i) v[i] += 0.1 * std::sin(1.0 + 3.7 * i);
  if (deflate) v -= deflate->dot(v) * *deflate;
  v.normalize();
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd w = solver.solve(v);
    if (deflate) w -= deflate->dot(w) * *deflate;
    const double nw = w.norm();
    if (!(nw > 0) || !std::isfinite(nw)) throw IterationDivergence("inverse iteration lost the iterate");
    v = w / nw;
    Eigen::VectorXd Bv = B * v;
    const double rq = v.dot(Bv);  // eigenvalue of B = -S - shift
    const double res = (Bv - rq * v).norm();
    r.value = rq + shift;
    r.residual = res;
    r.iterations = it;
    if (res <= tol * std::max(1.0, std::abs(r.value))) {
      r.converged = true;
      break;
    }
  }
  r.v = v;
  return r;
}

}  // namespace

Lambda0Result lambda0(const GeneratorContext& c, const Vec& V, double tol, int max_iter) {
  const int nf = c.n_free();
  if (nf == 0) throw IterationDivergence("no free nodes");
  Eigen::SparseMatrix<double> B = -symmetric_operator(c, V);
  // Gershgorin lower bound, shifted strictly below the spectrum
  double lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k < B.outerSize(); ++k) {
    double d = 0, off = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it) {
      if (it.row() == it.col()) d = it.value();
      else off += std::abs(it.value());
    }
    lo = std::min(lo, d - off);
  }
  const double shift = lo - 1.0;
  Eigen::SparseMatrix<double> I(nf, nf);
  I.setIdentity();
  Eigen::SparseMatrix<double> Bs = B - shift * I;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Bs);
  if (solver.info() != Eigen::Success) throw IterationDivergence("factorisation failed");

  InvIter first = inverse_iteration(B, 0.0, solver, nullptr, tol, max_iter);
  if (!first.converged) throw IterationDivergence("no convergence after " + std::to_string(max_iter) + " iterations");
  Lambda0Result out;
  out.value = first.value;
  out.residual = first.residual;
  out.iterations = first.iterations;
  if (nf > 1) {
    InvIter second = inverse_iteration(B, 0.0, solver, &first.v, tol, std::min(max_iter, 2000));
    out.second = second.value;
    out.degenerate = std::abs(second.value - first.value) < 1e-10;
  } else {
    out.second = std::numeric_limits<double>::infinity();
  }
  Eigen::VectorXd v = first.v;
  if (v.sum() < 0) v = -v;
  out.eigenvector = Vec::Zero(c.n());
  for (int a = 0; a < nf; ++a) out.eigenvector[c.free_nodes[a]] = v[a] / std::sqrt(c.m[c.free_nodes[a]]);
  return out;
}

}  // namespace tamelab
