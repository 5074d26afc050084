#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "tamelab/generator.hpp"

namespace tamelab {

enum class Method { Auto, DenseExpm, Krylov, CrankNicolson };

Method parse_method(const std::string& s);
std::string to_string(Method m);

struct PropagatorOptions {
  Method method = Method::Auto;
  int cn_steps = 0;          // 0: ceil(t / (h^2/2)), capped at 1e5
  double krylov_tol = 1e-13;  // per substep, relative
  int krylov_dim = 40;
  int dense_limit = 2000;    // Auto picks dense below this many free nodes
};

// e^{t(L - V)} on the free nodes, computed in the m-symmetrised frame
// S = M^{1/2} (L - V) M^{-1/2}.
class Propagator {
 public:
  Propagator(const GeneratorContext& ctx, const Vec& V = Vec(), PropagatorOptions opt = {});

  Vec apply(const Vec& f, double t) const;
  // Returns e^{tA} f / e^{log_scale}; safe when the result would overflow.
  Vec apply_scaled(const Vec& f, double t, double& log_scale) const;

  Method method() const { return method_; }
  const GeneratorContext& context() const { return *ctx_; }
  const Vec& potential() const { return V_; }

 private:
  Eigen::VectorXd to_sym(const Vec& f) const;
  Vec from_sym(const Eigen::VectorXd& u, double factor) const;
  void krylov(Eigen::VectorXd& u, double t, double& logs) const;
  void dense(Eigen::VectorXd& u, double t, double& logs) const;
  void crank_nicolson(Eigen::VectorXd& u, double t, double& logs) const;

  struct CnCache;
  const GeneratorContext* ctx_;
  Vec V_;
  PropagatorOptions opt_;
  Method method_;
  Eigen::VectorXd sqrt_m_;
  Eigen::SparseMatrix<double> S_;
  Eigen::MatrixXd Q_;
  Eigen::VectorXd lam_;
  std::shared_ptr<CnCache> cn_;
};

// Assembled A = L - V restricted to free nodes (m-weighted, not symmetrised).
Eigen::MatrixXd dense_operator(const GeneratorContext& ctx, const Vec& V = Vec());
Eigen::SparseMatrix<double> symmetric_operator(const GeneratorContext& ctx, const Vec& V = Vec());

Vec heat_apply(const GeneratorContext& ctx, const Vec& f, double t, Method method = Method::Auto,
               int cn_steps = 0);

// Solves (alpha - L + V) u = f.
Vec resolvent_apply(const GeneratorContext& ctx, const Vec& f, double alpha, const Vec& V = Vec());

double conservativeness_defect(const GeneratorContext& ctx, double t, Method method = Method::Auto);

struct Lambda0Result {
  double value = 0;
  double residual = 0;
  int iterations = 0;
  double second = 0;  // next eigenvalue estimate
  bool degenerate = false;
  Vec eigenvector;
};

// Bottom of the spectrum of -(L - V) by shifted inverse iteration.
Lambda0Result lambda0(const GeneratorContext& ctx, const Vec& V = Vec(), double tol = 1e-10,
                      int max_iter = 5000);

}  // namespace tamelab
