#include "dcmba/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcmba {

void require_size(const Vector& v, std::ptrdiff_t n, const char* what) {
  if (v.size() != n) {
    std::ostringstream os;
    os << what << ": expected length " << n << ", got " << v.size();
    throw DimensionError(os.str());
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entry");
}

Vector ConstraintOracle::component_grad(std::size_t i, const Vector& x) const {
  return jacobian(x).row(static_cast<Eigen::Index>(i)).transpose();
}

void ProblemSpec::validate() const {
  if (n == 0) throw DimensionError("ProblemSpec: n must be positive");
  if (!f || !phi || !psi || !g) throw std::invalid_argument("ProblemSpec: missing oracle");
  if (g->num_constraints() != m) {
    throw DimensionError("ProblemSpec: constraint oracle reports a different m");
  }
  if (known_feasible_point) {
    const Vector& x = *known_feasible_point;
    require_size(x, static_cast<std::ptrdiff_t>(n), "known_feasible_point");
    if (max_violation(g->value(x)) > 0.0) {
      throw std::invalid_argument("ProblemSpec: known_feasible_point violates g <= 0");
    }
  }
}

Matrix ProblemSpec::curvature_at(const Vector& x) const {
  if (!curvature) return Matrix(0, static_cast<Eigen::Index>(n));
  Matrix A = curvature->operator_at(x);
  if (A.cols() != static_cast<Eigen::Index>(n)) {
    throw DimensionError("curvature operator has wrong column count");
  }
  return A;
}

double max_violation(const Vector& gx) {
  return gx.size() == 0 ? -kInf : gx.maxCoeff();
}

double eval_objective(const ProblemSpec& spec, const Vector& x) {
  require_size(x, static_cast<std::ptrdiff_t>(spec.n), "eval_objective");
  require_finite(x, "eval_objective");
  return spec.f->value(x) + spec.phi->value(x) - spec.psi->value(x);
}

double eval_F(const ProblemSpec& spec, const Vector& x) {
  require_size(x, static_cast<std::ptrdiff_t>(spec.n), "eval_F");
  require_finite(x, "eval_F");
  if (max_violation(spec.g->value(x)) > 0.0) return kInf;
  return eval_objective(spec, x);
}

bool check_feasible(const ProblemSpec& spec, const Vector& x, double tol) {
  require_size(x, static_cast<std::ptrdiff_t>(spec.n), "check_feasible");
  return max_violation(spec.g->value(x)) <= tol;
}

// ---------------------------------------------------------------------------

L1Oracle::L1Oracle(double weight) : c_(weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("L1Oracle: weight must be positive");
  }
}

double L1Oracle::value(const Vector& x) const { return c_ * x.lpNorm<1>(); }

Vector L1Oracle::subgradient(const Vector& x) const {
  return x.unaryExpr([c = c_](double t) { return t > 0 ? c : (t < 0 ? -c : 0.0); });
}

Vector L1Oracle::prox(double t, const Vector& x) const {
  const double thr = t * c_;
  return x.unaryExpr([thr](double v) {
    if (v > thr) return v - thr;
    if (v < -thr) return v + thr;
    return 0.0;
  });
}

double L1Oracle::conj_value(const Vector& eta) const {
  return (eta.size() == 0 || eta.lpNorm<Eigen::Infinity>() <= c_) ? 0.0 : kInf;
}

Vector L1Oracle::conj_prox(double, const Vector& eta) const {
  return eta.cwiseMax(-c_).cwiseMin(c_);
}

double L1Oracle::subdiff_distance(const Vector& x, const Vector& u) const {
  require_size(u, x.size(), "L1Oracle::subdiff_distance");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double nearest;
    if (x[i] > 0) {
      nearest = c_;
    } else if (x[i] < 0) {
      nearest = -c_;
    } else {
      nearest = std::clamp(u[i], -c_, c_);
    }
    const double d = u[i] - nearest;
    acc += d * d;
  }
  return std::sqrt(acc);
}

double L1Oracle::fenchel_young_gap(const Vector& x, const Vector& eta) const {
  require_size(eta, x.size(), "L1Oracle::fenchel_young_gap");
  if (!std::isfinite(conj_value(eta))) return kInf;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // |x_i| (c - sign(x_i) eta_i), both factors >= 0 inside the box
    acc += x[i] >= 0 ? x[i] * (c_ - eta[i]) : -x[i] * (c_ + eta[i]);
  }
  return acc;
}

double ZeroConvexOracle::conj_value(const Vector& eta) const {
  return (eta.size() == 0 || eta.lpNorm<Eigen::Infinity>() == 0.0) ? 0.0 : kInf;
}

// ---------------------------------------------------------------------------

namespace {
// Relative slack when deciding whether a vector lies on the sphere of radius c.
constexpr double kSphereTol = 1e-12;
}  // namespace

L2CorrOracle::L2CorrOracle(double weight) : c_(weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("L2CorrOracle: weight must be nonnegative");
  }
}

double L2CorrOracle::value(const Vector& x) const { return c_ * x.norm(); }

Vector L2CorrOracle::xi(const Vector& x) const {
  Vector out = Vector::Zero(x.size());
  if (c_ == 0.0) return out;
  const double nx = x.norm();
  if (nx > 0.0) {
    out = (-c_ / nx) * x;
  } else if (x.size() > 0) {
    out[0] = c_;
  }
  return out;
}

double L2CorrOracle::conj_value(const Vector& u) const {
  return u.norm() <= c_ * (1.0 + kSphereTol) ? 0.0 : kInf;
}

std::optional<double> L2CorrOracle::conj_subdiff_distance(const Vector& x, const Vector& xi) const {
  require_size(xi, x.size(), "L2CorrOracle::conj_subdiff_distance");
  // psi^* is the indicator of the c-ball; its subdifferential at u = -xi is
  // the normal cone: R^n at c = 0, {0} inside, the outward ray on the sphere.
  if (c_ == 0.0) return 0.0;
  const double nu = xi.norm();
  if (nu > c_ * (1.0 + kSphereTol)) return kInf;
  if (nu < c_ * (1.0 - kSphereTol)) return x.norm();
  const Vector dir = -xi / nu;
  const double t = std::max(0.0, x.dot(dir));
  return (x - t * dir).norm();
}

// ---------------------------------------------------------------------------

QuadraticOracle::QuadraticOracle(Matrix H, Vector q, double r)
    : H_(std::move(H)), q_(std::move(q)), r_(r) {
  if (H_.rows() != H_.cols() || H_.rows() != q_.size()) {
    throw DimensionError("QuadraticOracle: H must be n x n and q length n");
  }
}

double QuadraticOracle::value(const Vector& x) const {
  require_size(x, q_.size(), "QuadraticOracle::value");
  return 0.5 * x.dot(H_ * x) + q_.dot(x) + r_;
}

Vector QuadraticOracle::gradient(const Vector& x) const {
  require_size(x, q_.size(), "QuadraticOracle::gradient");
  return 0.5 * (H_ * x + H_.transpose() * x) + q_;
}

QuadraticConstraints::QuadraticConstraints(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (p.H.rows() != p.H.cols() || p.H.rows() != p.q.size()) {
      throw DimensionError("QuadraticConstraints: inconsistent piece");
    }
  }
}

Vector QuadraticConstraints::value(const Vector& x) const {
  Vector out(static_cast<Eigen::Index>(pieces_.size()));
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    require_size(x, p.q.size(), "QuadraticConstraints::value");
    out[static_cast<Eigen::Index>(i)] = 0.5 * x.dot(p.H * x) + p.q.dot(x) + p.r;
  }
  return out;
}

Matrix QuadraticConstraints::jacobian(const Vector& x) const {
  Matrix J(static_cast<Eigen::Index>(pieces_.size()), x.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    require_size(x, p.q.size(), "QuadraticConstraints::jacobian");
    J.row(static_cast<Eigen::Index>(i)) = (0.5 * (p.H * x + p.H.transpose() * x) + p.q).transpose();
  }
  return J;
}

}  // namespace dcmba
