#pragma once

// Problem abstraction for constrained DC programs
//
//   minimize  f(x) + phi(x) - psi(x)   subject to  g(x) <= 0,
//
// with f smooth, phi and psi convex and g a smooth map into R^m. Each piece
// is supplied as an oracle object; oracles are immutable after construction
// and may be shared between threads.

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcmba {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when an operand has the wrong length or shape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an operand contains NaN or Inf.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

void require_size(const Vector& v, std::ptrdiff_t n, const char* what);
void require_finite(const Vector& v, const char* what);
inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Positive part, componentwise or scalar.
inline double pos(double t) { return t > 0.0 ? t : 0.0; }

class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
};

/// Finite-valued convex function with a tractable prox and conjugate.
class ConvexOracle {
 public:
  virtual ~ConvexOracle() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector subgradient(const Vector& x) const = 0;
  /// prox_{t phi}(x)
  virtual Vector prox(double t, const Vector& x) const = 0;
  /// phi^*(eta), +inf outside the domain.
  virtual double conj_value(const Vector& eta) const = 0;
  /// prox_{t phi^*}(eta)
  virtual Vector conj_prox(double t, const Vector& eta) const = 0;
  /// dist(u, subdifferential of phi at x).
  virtual double subdiff_distance(const Vector& x, const Vector& u) const = 0;
  /// False when subdiff_distance only returns an upper bound.
  virtual bool exact_subdiff_distance() const { return true; }
  /// phi(x) + phi^*(eta) - <eta, x> >= 0. Overrides should evaluate it as a sum
  /// of nonnegative terms, since it is compared against tiny decreases.
  virtual double fenchel_young_gap(const Vector& x, const Vector& eta) const {
    return value(x) + conj_value(eta) - eta.dot(x);
  }
};

/// The subtracted convex part psi. `xi(x)` returns an element of d(-psi)(x).
class ConcaveCorrOracle {
 public:
  virtual ~ConcaveCorrOracle() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector xi(const Vector& x) const = 0;
  /// psi^*(u), +inf outside the domain.
  virtual double conj_value(const Vector& u) const = 0;
  /// dist(x, d psi^*(-xi)) when a closed form is known.
  virtual std::optional<double> conj_subdiff_distance(const Vector& x, const Vector& xi) const {
    (void)x;
    (void)xi;
    return std::nullopt;
  }
};

class ConstraintOracle {
 public:
  virtual ~ConstraintOracle() = default;
  virtual std::size_t num_constraints() const = 0;
  virtual Vector value(const Vector& x) const = 0;
  /// m x n, row i is the gradient of g_i.
  virtual Matrix jacobian(const Vector& x) const = 0;
  virtual Vector component_grad(std::size_t i, const Vector& x) const;
};

/// Linear map A(x) feeding the curvature Q = mu I + A^T A of the subproblem.
/// The default produces an empty (0 x n) map, i.e. Q = mu I.
class CurvatureModel {
 public:
  virtual ~CurvatureModel() = default;
  virtual Matrix operator_at(const Vector& x) const = 0;
};

struct ProblemSpec {
  std::size_t n = 0;
  std::size_t m = 0;
  std::shared_ptr<const SmoothOracle> f;
  std::shared_ptr<const ConvexOracle> phi;
  std::shared_ptr<const ConcaveCorrOracle> psi;
  std::shared_ptr<const ConstraintOracle> g;
  std::shared_ptr<const CurvatureModel> curvature;  // may be null
  std::optional<Vector> known_feasible_point;

  /// Checks that all oracles are present, dimensions agree and the known
  /// feasible point (if any) satisfies g <= 0 exactly.
  void validate() const;
  Matrix curvature_at(const Vector& x) const;
};

/// f + phi - psi when g(x) <= 0 componentwise, +inf otherwise.
double eval_F(const ProblemSpec& spec, const Vector& x);
/// f + phi - psi regardless of feasibility.
double eval_objective(const ProblemSpec& spec, const Vector& x);
bool check_feasible(const ProblemSpec& spec, const Vector& x, double tol);
double max_violation(const Vector& gx);

// ---------------------------------------------------------------------------
// Stock oracles

/// c * ||x||_1
class L1Oracle final : public ConvexOracle {
 public:
  explicit L1Oracle(double weight);
  double weight() const { return c_; }
  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  Vector prox(double t, const Vector& x) const override;
  double conj_value(const Vector& eta) const override;
  Vector conj_prox(double t, const Vector& eta) const override;
  double subdiff_distance(const Vector& x, const Vector& u) const override;
  double fenchel_young_gap(const Vector& x, const Vector& eta) const override;

 private:
  double c_;
};

/// phi = 0. Its conjugate is the indicator of {0}.
class ZeroConvexOracle final : public ConvexOracle {
 public:
  double value(const Vector&) const override { return 0.0; }
  Vector subgradient(const Vector& x) const override { return Vector::Zero(x.size()); }
  Vector prox(double, const Vector& x) const override { return x; }
  double conj_value(const Vector& eta) const override;
  Vector conj_prox(double, const Vector& eta) const override { return Vector::Zero(eta.size()); }
  double subdiff_distance(const Vector&, const Vector& u) const override { return u.norm(); }
  double fenchel_young_gap(const Vector&, const Vector& eta) const override { return conj_value(eta); }
};

/// psi = c * ||x||_2. xi(0) is the deterministic choice c * e_1.
class L2CorrOracle final : public ConcaveCorrOracle {
 public:
  explicit L2CorrOracle(double weight);
  double weight() const { return c_; }
  double value(const Vector& x) const override;
  Vector xi(const Vector& x) const override;
  double conj_value(const Vector& u) const override;
  std::optional<double> conj_subdiff_distance(const Vector& x, const Vector& xi) const override;

 private:
  double c_;
};

/// Smooth convex quadratic 0.5 x^T H x + <q, x> + r, mostly for tests and toys.
class QuadraticOracle final : public SmoothOracle {
 public:
  QuadraticOracle(Matrix H, Vector q, double r = 0.0);
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

 private:
  Matrix H_;
  Vector q_;
  double r_;
};

/// g_i(x) = 0.5 x^T H_i x + <q_i, x> + r_i.
class QuadraticConstraints final : public ConstraintOracle {
 public:
  struct Piece {
    Matrix H;
    Vector q;
    double r = 0.0;
  };
  explicit QuadraticConstraints(std::vector<Piece> pieces);
  std::size_t num_constraints() const override { return pieces_.size(); }
  Vector value(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;

 private:
  std::vector<Piece> pieces_;
};

/// Constant curvature map A(x) = A.
class FixedCurvature final : public CurvatureModel {
 public:
  explicit FixedCurvature(Matrix A) : A_(std::move(A)) {}
  Matrix operator_at(const Vector&) const override { return A_; }

 private:
  Matrix A_;
};

}  // namespace dcmba
