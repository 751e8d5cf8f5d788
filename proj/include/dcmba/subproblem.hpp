#pragma once

// Moving-balls surrogate at an anchor x^k.
//
// For fixed (mu, L) the subproblem is
//
//   min  theta(x) + phi(x)   s.t.  G(x) = g(x^k) + J_k (x - x^k) + 0.5 |x - x^k|^2 L <= 0
//
// with theta(x) = C^k + <b^k, x - x^k> + 0.5 (mu |x - x^k|^2 + |A (x - x^k)|^2),
// b^k = grad f(x^k) + xi^k and C^k = f(x^k) - psi(x^k). All oracle data is
// cached in an Anchor, so raising mu or L never touches the oracles again.

#include "dcmba/core_model.hpp"

#include <memory>

namespace dcmba {

/// Q = mu I + A^T A.
class CurvatureOp {
 public:
  CurvatureOp(double mu, std::shared_ptr<const Matrix> A);
  double mu() const { return mu_; }
  Eigen::Index p() const { return A_->rows(); }
  const Matrix& A() const { return *A_; }
  Vector apply_A(const Vector& x) const;
  Vector apply_At(const Vector& z) const;
  /// Q x
  Vector apply_Q(const Vector& x) const;

 private:
  double mu_;
  std::shared_ptr<const Matrix> A_;
};

/// Everything the surrogate needs from the oracles at x^k.
struct Anchor {
  Vector xk;
  Vector xi_k;
  double fk = 0.0;
  double psik = 0.0;
  double phik = 0.0;
  Vector gradf;
  Vector gk;
  Matrix Jk;
  std::shared_ptr<const Matrix> A;
  Vector bk;   // gradf + xi_k
  double Ck;   // fk - psik
  Vector dk;   // A xk

  /// Queries every oracle once at x and assembles the cached data.
  static std::shared_ptr<const Anchor> build(const ProblemSpec& spec, const Vector& x, const Vector& xi);
  std::size_t n() const { return static_cast<std::size_t>(xk.size()); }
  std::size_t m() const { return static_cast<std::size_t>(gk.size()); }
  /// F(x^k) = f + phi - psi at the anchor.
  double objective() const { return fk + phik - psik; }
};

class ModelParams {
 public:
  ModelParams(std::shared_ptr<const Anchor> anchor, double mu, Vector L);

  const Anchor& anchor() const { return *anchor_; }
  std::shared_ptr<const Anchor> anchor_ptr() const { return anchor_; }
  const CurvatureOp& curv() const { return curv_; }
  double mu() const { return curv_.mu(); }
  const Vector& L() const { return L_; }
  const Vector& xk() const { return anchor_->xk; }
  const Vector& gk() const { return anchor_->gk; }
  const Matrix& Jk() const { return anchor_->Jk; }
  const Vector& bk() const { return anchor_->bk; }
  double Ck() const { return anchor_->Ck; }
  std::size_t n() const { return anchor_->n(); }
  std::size_t m() const { return anchor_->m(); }

 private:
  std::shared_ptr<const Anchor> anchor_;
  CurvatureOp curv_;
  Vector L_;
};

Vector eval_G(const ModelParams& params, const Vector& x);
/// grad_x G(x) lambda = J_k^T lambda + <L, lambda> (x - x^k).
Vector grad_G_apply(const ModelParams& params, const Vector& x, const Vector& lambda);
/// Row i is grad g_i(x^k) + L_i (x - x^k).
Matrix grad_x_G(const ModelParams& params, const Vector& x);

double eval_vartheta(const ModelParams& params, const Vector& x);
Vector grad_vartheta(const ModelParams& params, const Vector& x);
double eval_Fkj(const ModelParams& params, const ConvexOracle& phi, const Vector& x);

/// KKT residual of the subproblem at (y, v, lambda). lambda must be >= 0.
/// The first term pairs the stationarity vector with the absolute point y.
double residual_Rkj(const ModelParams& params, const Vector& y, const Vector& v, const Vector& lambda);

struct Certificate {
  Vector y;
  Vector v;
  Vector lambda;
  double residual = kInf;
  double Fkj_y = kInf;
  double lower_bound = -kInf;
  double primal_gap_bound = kInf;  // F_kj(y) - lower_bound
  double step_norm = 0.0;
  bool residual_ok = false;
  bool descent_ok = false;
  bool gap_ok = false;
  bool passed = false;
};

struct InexactParams {
  double beta_R = 1e10;
  double beta_F = 1e8;
};

/// F_kj(x) - F_kj(x^k), evaluated from the step so that small decreases are
/// not lost against the size of F_kj.
double model_decrease(const ModelParams& params, const ConvexOracle& phi, const Vector& x);

/// Tests the inexactness conditions for the candidate (y, v, lambda).
/// `lower_bound` must lower-bound the subproblem optimum.
Certificate check_inexact(const ModelParams& params, const ConvexOracle& phi, const Vector& y,
                          const Vector& v, const Vector& lambda, double lower_bound,
                          const InexactParams& inexact);
/// Same test with the bound given relative to the anchor: F_kj(x^k) - gap_bound
/// lower-bounds the subproblem optimum (gap_bound >= 0 up to rounding).
Certificate check_inexact_rel(const ModelParams& params, const ConvexOracle& phi, const Vector& y,
                              const Vector& v, const Vector& lambda, double gap_bound,
                              const InexactParams& inexact);

struct CurvatureBounds {
  double lo = 1e-16;
  double hi = 1e16;
};

/// Barzilai-Borwein estimate from a secant pair, clipped to bounds.
double bb_estimate(const Vector& dx, const Vector& dy, const CurvatureBounds& bounds);
inline double bb_init_mu(const Vector& dx, const Vector& dgradf, const CurvatureBounds& bounds) {
  return bb_estimate(dx, dgradf, bounds);
}
/// dJ = J(x^k) - J(x^{k-1}); row i gives the secant for g_i.
Vector bb_init_L(const Vector& dx, const Matrix& dJ, const CurvatureBounds& bounds);

}  // namespace dcmba
