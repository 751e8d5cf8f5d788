#pragma once

// DCA baseline for the QCQP family and brute-force oracles for tiny problems.
//
// DCA step k picks xi in d psi(x^k), linearizes -P |x|^2 in every constraint
// and solves the convex QCQP
//   min f(x) + phi(x) - <xi, x>   s.t. |B_i x + h_i|^2 - 2P <x^k, x> + P |x^k|^2 - d_i^2 <= 0
// with the iMBA driver (psi = 0) started at x^k.

#include "dcmba/driver.hpp"
#include "dcmba/instances.hpp"

#include <stdexcept>

namespace dcmba {

/// Driver defaults with step tolerance 1e-8; the complementarity exit stays on.
IMBAConfig dca_default_sub_config();

struct DcaConfig {
  double eps = 1e-5;
  int k_max = 10000;
  IMBAConfig sub_cfg = dca_default_sub_config();

  void validate() const;
};

/// DCA on a QCQP instance. xi in the report follows the driver's convention
/// (an element of d(-psi)), so it is the negative of the DCA subgradient.
/// An inner solve hitting its iteration cap ends the run with exit iter_cap.
SolveReport dca_run(const QCQPInstance& inst, const Vector& x0, const DcaConfig& cfg);

/// Constraints of one DCA subproblem: concave part linearized at xk.
class LinearizedFactoredConstraints final : public ConstraintOracle {
 public:
  LinearizedFactoredConstraints(FactoredConstraintSet cons, Vector xk);
  std::size_t num_constraints() const override { return cons_.B.size(); }
  Vector value(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;

 private:
  FactoredConstraintSet cons_;  // P_scale kept only for the linear term
  Vector xk_;
};

struct Box {
  Vector lo;
  Vector hi;
};

/// [-2, 2]^n scaled by max(|x0|, 1).
Box default_box(const Vector& x0);
/// Bounding box of the first constraint ellipsoid intersected with the others;
/// contains the feasible set when P_scale = 0.
Box qcqp_feasible_box(const QCQPInstance& inst);

class EmptyGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  Vector x_star;
  double F_star = 0.0;
  double grid_resolution = 0.0;  // final grid spacing (max over axes)
  int refinement_iters = 0;
};

/// Dense grid search over the box keeping points with g <= 0, followed by
/// refine_iters rounds on a box around the incumbent whose width halves each
/// round (half the original box in round one).
/// grid_pts <= 0 picks 201 per axis for n <= 2 and 61 for n = 3.
OracleResult brute_force_min(const ProblemSpec& spec, const Box& box, int grid_pts = 0, int refine_iters = 40);

/// True iff g(x) <= 0 and chi_measure(x, xi, lambda) <= tol. Throws on lambda < 0.
bool kkt_verify(const ProblemSpec& spec, const Vector& x, const Vector& xi, const Vector& lambda, double tol);

}  // namespace dcmba
