#include "dcmba/subproblem.hpp"

#include <algorithm>
#include <cmath>

namespace dcmba {

CurvatureOp::CurvatureOp(double mu, std::shared_ptr<const Matrix> A) : mu_(mu), A_(std::move(A)) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("CurvatureOp: mu must be positive");
  if (!A_) throw std::invalid_argument("CurvatureOp: null operator");
}

Vector CurvatureOp::apply_A(const Vector& x) const {
  if (A_->rows() == 0) return Vector(0);
  return (*A_) * x;
}

Vector CurvatureOp::apply_At(const Vector& z) const {
  if (A_->rows() == 0) return Vector::Zero(A_->cols());
  return A_->transpose() * z;
}

Vector CurvatureOp::apply_Q(const Vector& x) const { return mu_ * x + apply_At(apply_A(x)); }

std::shared_ptr<const Anchor> Anchor::build(const ProblemSpec& spec, const Vector& x, const Vector& xi) {
  require_size(x, static_cast<std::ptrdiff_t>(spec.n), "Anchor::build");
  require_size(xi, static_cast<std::ptrdiff_t>(spec.n), "Anchor::build(xi)");
  require_finite(x, "Anchor::build");
  auto a = std::make_shared<Anchor>();
  a->xk = x;
  a->xi_k = xi;
  a->fk = spec.f->value(x);
  a->psik = spec.psi->value(x);
  a->phik = spec.phi->value(x);
  a->gradf = spec.f->gradient(x);
  a->gk = spec.g->value(x);
  a->Jk = spec.g->jacobian(x);
  if (a->Jk.rows() != static_cast<Eigen::Index>(spec.m) || a->Jk.cols() != x.size()) {
    throw DimensionError("Anchor::build: jacobian has wrong shape");
  }
  a->A = std::make_shared<const Matrix>(spec.curvature_at(x));
  a->bk = a->gradf + xi;
  a->Ck = a->fk - a->psik;
  a->dk = a->A->rows() ? Vector((*a->A) * x) : Vector(0);
  return a;
}

ModelParams::ModelParams(std::shared_ptr<const Anchor> anchor, double mu, Vector L)
    : anchor_(std::move(anchor)), curv_(mu, anchor_->A), L_(std::move(L)) {
  require_size(L_, static_cast<std::ptrdiff_t>(anchor_->m()), "ModelParams(L)");
  if ((L_.array() <= 0.0).any()) throw std::invalid_argument("ModelParams: L must be positive");
}

Vector eval_G(const ModelParams& params, const Vector& x) {
  require_size(x, static_cast<std::ptrdiff_t>(params.n()), "eval_G");
  const Vector d = x - params.xk();
  return params.gk() + params.Jk() * d + (0.5 * d.squaredNorm()) * params.L();
}

Vector grad_G_apply(const ModelParams& params, const Vector& x, const Vector& lambda) {
  require_size(x, static_cast<std::ptrdiff_t>(params.n()), "grad_G_apply");
  require_size(lambda, static_cast<std::ptrdiff_t>(params.m()), "grad_G_apply(lambda)");
  if (params.m() == 0) return Vector::Zero(x.size());
  return params.Jk().transpose() * lambda + params.L().dot(lambda) * (x - params.xk());
}

Matrix grad_x_G(const ModelParams& params, const Vector& x) {
  require_size(x, static_cast<std::ptrdiff_t>(params.n()), "grad_x_G");
  Matrix out = params.Jk();
  const Vector d = x - params.xk();
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) += params.L()[i] * d.transpose();
  return out;
}

double eval_vartheta(const ModelParams& params, const Vector& x) {
  require_size(x, static_cast<std::ptrdiff_t>(params.n()), "eval_vartheta");
  const Vector d = x - params.xk();
  const double quad = params.mu() * d.squaredNorm() + params.curv().apply_A(d).squaredNorm();
  return params.Ck() + params.bk().dot(d) + 0.5 * quad;
}

Vector grad_vartheta(const ModelParams& params, const Vector& x) {
  require_size(x, static_cast<std::ptrdiff_t>(params.n()), "grad_vartheta");
  return params.bk() + params.curv().apply_Q(x - params.xk());
}

double eval_Fkj(const ModelParams& params, const ConvexOracle& phi, const Vector& x) {
  return eval_vartheta(params, x) + phi.value(x);
}

double residual_Rkj(const ModelParams& params, const Vector& y, const Vector& v, const Vector& lambda) {
  require_size(v, static_cast<std::ptrdiff_t>(params.n()), "residual_Rkj(v)");
  require_size(lambda, static_cast<std::ptrdiff_t>(params.m()), "residual_Rkj(lambda)");
  if ((lambda.array() < 0.0).any()) throw std::invalid_argument("residual_Rkj: lambda must be >= 0");
  const Vector s = grad_vartheta(params, y) + v + grad_G_apply(params, y, lambda);
  const Vector G = eval_G(params, y);
  const double viol = G.size() ? pos(G.maxCoeff()) : 0.0;
  return pos(y.dot(s)) + pos(-lambda.dot(G)) + s.norm() + viol;
}

double model_decrease(const ModelParams& params, const ConvexOracle& phi, const Vector& x) {
  require_size(x, static_cast<std::ptrdiff_t>(params.n()), "model_decrease");
  const Vector d = x - params.xk();
  const double quad = params.mu() * d.squaredNorm() + params.curv().apply_A(d).squaredNorm();
  return params.bk().dot(d) + 0.5 * quad + (phi.value(x) - params.anchor().phik);
}

Certificate check_inexact_rel(const ModelParams& params, const ConvexOracle& phi, const Vector& y,
                              const Vector& v, const Vector& lambda, double gap_bound,
                              const InexactParams& inexact) {
  Certificate c;
  c.y = y;
  c.v = v;
  c.lambda = lambda;
  c.step_norm = (y - params.xk()).norm();
  const double budget_sq = 0.5 * c.step_norm * c.step_norm;
  const double Fkj_anchor = params.Ck() + params.anchor().phik;
  const double decrease = model_decrease(params, phi, y);

  c.residual = residual_Rkj(params, y, v, lambda);
  c.Fkj_y = Fkj_anchor + decrease;
  c.lower_bound = Fkj_anchor - gap_bound;
  c.primal_gap_bound = decrease + gap_bound;

  c.residual_ok = c.residual <= inexact.beta_R * budget_sq;
  c.descent_ok = decrease <= 0.0;
  c.gap_ok = c.primal_gap_bound <= inexact.beta_F * budget_sq;
  c.passed = c.residual_ok && c.descent_ok && c.gap_ok && y.allFinite();
  return c;
}

Certificate check_inexact(const ModelParams& params, const ConvexOracle& phi, const Vector& y,
                          const Vector& v, const Vector& lambda, double lower_bound,
                          const InexactParams& inexact) {
  const double Fkj_anchor = params.Ck() + params.anchor().phik;
  Certificate c = check_inexact_rel(params, phi, y, v, lambda, Fkj_anchor - lower_bound, inexact);
  c.lower_bound = lower_bound;
  return c;
}

double bb_estimate(const Vector& dx, const Vector& dy, const CurvatureBounds& bounds) {
  require_size(dy, dx.size(), "bb_estimate");
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  const double sxy = std::abs(dx.dot(dy));
  double est = bounds.lo;
  bool any = false;
  if (sxy > 0.0) {
    est = std::max(est, syy / sxy);
    any = true;
  }
  if (sxx > 0.0) {
    est = std::max(est, sxy / sxx);
    any = true;
  }
  if (!any || !std::isfinite(est)) return bounds.lo;
  return std::min(est, bounds.hi);
}

Vector bb_init_L(const Vector& dx, const Matrix& dJ, const CurvatureBounds& bounds) {
  if (dJ.cols() != dx.size()) throw DimensionError("bb_init_L: dJ has wrong column count");
  Vector out(dJ.rows());
  for (Eigen::Index i = 0; i < dJ.rows(); ++i) out[i] = bb_estimate(dx, dJ.row(i).transpose(), bounds);
  return out;
}

}  // namespace dcmba
