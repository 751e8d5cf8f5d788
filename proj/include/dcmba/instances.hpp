#pragma once

// Seeded generators for the QCQP and Student's t test families, their oracles,
// and the .dcinst.json file format.
//
// Constraints are kept in factored form
//   g_i(x) = |B_i x + h_i|^2 - P |x|^2 - d_i^2,   B_i = D_i^{1/2} Y_i,
// so Q_i = B_i^T B_i is never formed outside cross-checks.
//
// Draw order: a generator seeded with s uses SplitMix64(s).split(k) streams,
// k = 1 for the objective data, 2 for x0, 3 for the Student's t signal and
// noise, and 100 + i for constraint i (Householder vector, diagonal shuffle,
// h_i, then s_i). Streams are independent, so instances can be generated in
// parallel and adding constraints does not change the others.

#include "dcmba/core_model.hpp"
#include "dcmba/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace dcmba {

struct HouseholderFactor {
  Matrix B;       // D^{1/2} Y
  Matrix Y;       // I - 2 y y^T / |y|^2
  Vector D_diag;  // shuffled 10^{c (j-1)/(n-1)}
};

HouseholderFactor gen_householder_factor(SplitMix64& rng, int n, double cond_exponent);

/// |B x + h|^2 - P |x|^2, the part of g_i that does not depend on d_i^2.
double factored_quadratic(const Matrix& B, const Vector& h, double P, const Vector& x);

struct FactoredConstraintSet {
  std::vector<Matrix> B;
  std::vector<Vector> h;
  Vector d2;
  double P_scale = 0.0;

  int size() const { return static_cast<int>(B.size()); }
  Vector value(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
};

/// g_i(x) = x^T Q x + 2 <b, x> + c with Q = B^T B - P I, b = B^T h, c = |h|^2 - d^2.
struct ExpandedConstraint {
  Matrix Q;
  Vector b;
  double c = 0.0;
  double value(const Vector& x) const { return x.dot(Q * x) + 2.0 * b.dot(x) + c; }
};
ExpandedConstraint expand_constraint(const FactoredConstraintSet& cons, int i);

struct QCQPParams {
  int n = 30;
  int m = 10;
  double omega0 = 10.0;
  double P_scale = 0.0;
  double phi_weight = 0.01;
  double psi_weight = 0.0;
  double cond_exponent = 4.0;
  std::uint64_t seed = 1;

  /// l1-regularized convex family: P = 0, psi = 0, phi = 0.01 |.|_1.
  static QCQPParams convex_l1(int n, int m, double omega0, std::uint64_t seed, double cond_exponent = 4.0);
  /// l1 - l2 family: P = 1e5 I, psi = 0.01 |.|.
  static QCQPParams dc_l1l2(int n, int m, double omega0, std::uint64_t seed, double cond_exponent = 4.0);
};

struct QCQPInstance {
  int n = 0;
  int m = 0;
  FactoredConstraintSet cons;
  Matrix Y0;       // p x n, p = floor(n / 2)
  Vector b0_unit;  // b0 / |b0|
  double omega0 = 0.0;
  double phi_weight = 0.0;
  double psi_weight = 0.0;
  Vector x0;
  std::uint64_t seed = 0;
  double cond_exponent = 0.0;
};

QCQPInstance gen_qcqp(const QCQPParams& params);

struct StudentTParams {
  int n = 80;
  int m = 10;
  double P_scale = 0.0;
  double phi_weight = 0.01;
  double psi_weight = 0.01;
  double cond_exponent = 4.0;
  std::uint64_t seed = 1;
};

struct StudentTInstance {
  int n = 0;
  int N = 0;                // floor(n / 8) measurements
  std::vector<int> J;       // selected DCT rows, ascending
  Vector b;
  Vector x_true;
  FactoredConstraintSet cons;
  double phi_weight = 0.0;
  double psi_weight = 0.0;
  Vector x0;
  std::uint64_t seed = 0;
  double cond_exponent = 0.0;

  int m() const { return cons.size(); }
};

StudentTInstance gen_student_t(const StudentTParams& params);

/// Rows J of the orthonormal DCT-II matrix:
/// C[k][j] = a_k cos(pi (2j + 1) k / (2n)), a_0 = sqrt(1/n), a_k = sqrt(2/n).
Matrix dct_rows(int n, const std::vector<int>& J);

/// theta(u) = sum log(1 + 4 u_i^2) and its derivatives.
double student_theta(const Vector& u);
Vector student_theta_grad(const Vector& u);
/// Diagonal of the Hessian of theta: (8 - 32 u^2) / (1 + 4 u^2)^2.
Vector student_theta_hess(const Vector& u);

// ---------------------------------------------------------------------------
// Oracles

class QCQPObjective final : public SmoothOracle {
 public:
  QCQPObjective(Matrix Y0, Vector b0_unit, double omega0);
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

 private:
  Matrix Y0_;
  Vector lin_;  // 2 omega0 b0_unit
};

class FactoredConstraints final : public ConstraintOracle {
 public:
  explicit FactoredConstraints(FactoredConstraintSet cons) : cons_(std::move(cons)) {}
  std::size_t num_constraints() const override { return cons_.B.size(); }
  Vector value(const Vector& x) const override { return cons_.value(x); }
  Matrix jacobian(const Vector& x) const override { return cons_.jacobian(x); }

 private:
  FactoredConstraintSet cons_;
};

/// f(x) = theta(A x - b).
class StudentTLoss final : public SmoothOracle {
 public:
  StudentTLoss(Matrix A, Vector b);
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }

 private:
  Matrix A_;
  Vector b_;
};

/// A(x) = diag([omega(x)]_+^{1/2}) A with omega the Hessian diagonal of theta at A x - b.
class StudentTCurvature final : public CurvatureModel {
 public:
  explicit StudentTCurvature(std::shared_ptr<const StudentTLoss> loss) : loss_(std::move(loss)) {}
  Matrix operator_at(const Vector& x) const override;

 private:
  std::shared_ptr<const StudentTLoss> loss_;
};

ProblemSpec make_problem(const QCQPInstance& inst);
ProblemSpec make_problem(const StudentTInstance& inst);

// ---------------------------------------------------------------------------
// Files

using Instance = std::variant<QCQPInstance, StudentTInstance>;

inline constexpr int kInstanceFormatVersion = 1;

class InstanceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class VersionMismatchError : public InstanceFormatError {
 public:
  using InstanceFormatError::InstanceFormatError;
};
/// Also raised for truncated or unparsable files.
class ChecksumError : public InstanceFormatError {
 public:
  using InstanceFormatError::InstanceFormatError;
};

/// Canonical text of the file; identical instances give identical bytes.
std::string serialize_instance(const Instance& inst);
Instance parse_instance(const std::string& text);
/// FNV-1a 64 of the canonical payload, as 16 hex digits.
std::string instance_checksum(const Instance& inst);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

ProblemSpec make_problem(const Instance& inst);
const Vector& instance_x0(const Instance& inst);
std::string instance_kind(const Instance& inst);

}  // namespace dcmba
