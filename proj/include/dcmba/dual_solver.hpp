#pragma once

// Dual of the moving-balls subproblem and its proximal-gradient solver.
//
// With w = (lambda, eta, zeta), r(w) = b^k + J_k^T lambda + eta + A^T zeta and
// s(w) = mu + <lambda, L>, the dual objective is
//
//   Xi(w) = |r|^2 / (2 s) - <eta, x^k> - <lambda, g(x^k)> + 0.5 |zeta|^2 - C^k
//           + indicator(lambda >= 0) + phi^*(eta),
//
// and -Xi(w) is the Lagrangian dual function, hence a lower bound on the
// subproblem optimum for every admissible w.

#include "dcmba/subproblem.hpp"

#include <optional>
#include <string>

namespace dcmba {

struct DualPoint {
  Vector lambda;
  Vector eta;
  Vector zeta;

  static DualPoint zeros(std::size_t m, std::size_t n, Eigen::Index p);
  bool matches(const ModelParams& params) const;
  double squared_distance(const DualPoint& o) const;
};

struct DualGradient {
  Vector lambda;
  Vector eta;
  Vector zeta;
};

struct PGlsConfig {
  double tau_min = 1e-10;
  double tau_max = 1e10;
  double rho = 10.0;     // backtracking factor
  double delta = 1e-6;   // sufficient-decrease constant
  int l_max = 2000;
  int max_backtracks = 60;
  /// tau_{0,0} = tau0_scale * |J_k|^2 (spectral norm), clipped to [tau_min, tau_max].
  double tau0_scale = 1e-8;
  int power_iters = 20;
  /// Overrides the tau_{0,0} rule when set.
  std::optional<double> tau0;
  /// Scale the prox step per block (see BlockMetric). Off gives the plain
  /// Euclidean method with tau_{0,0} = tau0_scale |J_k|^2.
  bool block_metric = true;

  void validate() const;
};

/// Diagonal metric |w|^2 = sum_i a_i lambda_i^2 + b |eta|^2 + c |zeta|^2 used in
/// the prox step. With a_i = |grad g_i(x^k)|^2, b = 1 and c = s(w^0) + |A|^2 the
/// curvature of every block is of order 1/s, so one step size serves all three.
/// An empty `lambda` means unit weights.
struct BlockMetric {
  Vector lambda;
  double eta = 1.0;
  double zeta = 1.0;
};

enum class DualExit { certified, iter_cap, stalled };
std::string to_string(DualExit e);

struct DualReport {
  DualPoint w_final;
  Vector primal;     // candidate y
  Vector v;          // subgradient paired with y
  Vector lambda;     // multiplier paired with y
  Certificate certificate;
  double lower_bound = -kInf;
  int pgls_iters = 0;
  int backtracks = 0;
  double last_tau = 0.0;
  DualExit exit = DualExit::iter_cap;
};

/// Smooth part Theta of the dual objective.
double eval_Theta(const ModelParams& params, const DualPoint& w);
/// Full dual objective; +inf when lambda has a negative entry or eta is
/// outside dom phi^*.
double eval_Xi(const ModelParams& params, const ConvexOracle& phi, const DualPoint& w);
/// Xi(w) + F_kj(x^k) = |r|^2 / (2 s) + [phi(x^k) + phi^*(eta) - <eta, x^k>]
///                     - <lambda, g(x^k)> + 0.5 |zeta|^2,
/// a sum of nonnegative terms. PGls runs on this shifted objective (a constant
/// offset), which keeps the line search meaningful when the subproblem
/// decrease is far below the magnitude of F.
double eval_Xi_rel(const ModelParams& params, const ConvexOracle& phi, const DualPoint& w);
DualGradient grad_Theta(const ModelParams& params, const DualPoint& w);
/// x^k - r(w) / s(w): the minimizer of the Lagrangian in x.
Vector recover_primal(const ModelParams& params, const DualPoint& w);

/// Spectral norm estimate of a dense matrix by power iteration on M^T M.
double spectral_norm_estimate(const Matrix& M, int iters);
BlockMetric block_metric(const ModelParams& params, const DualPoint& w0, const PGlsConfig& cfg);
/// tau_{0,0}: tau0_scale |J_k|^2 in the Euclidean metric, tau0_scale in the block metric.
double initial_tau(const ModelParams& params, const PGlsConfig& cfg);

struct PGlsStep {
  DualPoint w_next;
  double xi_next = kInf;
  double tau_used = 0.0;
  int nu = 0;
  bool stalled = false;
};

/// One PGls iteration from w (with eval_Xi_rel(w) = xi_w): backtracks tau from tau_l0
/// by factors rho until the sufficient-decrease test accepts.
PGlsStep pgls_step(const ModelParams& params, const ConvexOracle& phi, const DualPoint& w, double xi_w,
                   double tau_l0, const PGlsConfig& cfg, const BlockMetric& metric = {});

/// Runs PGls from w0 (zero when absent or mismatched) until a candidate
/// passes the inexactness test or the iteration budget is spent.
DualReport solve_dual(const ModelParams& params, const ConvexOracle& phi, const PGlsConfig& cfg,
                      const InexactParams& inexact, const std::optional<DualPoint>& w0 = std::nullopt);

}  // namespace dcmba
