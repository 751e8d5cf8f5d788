#pragma once

// Inexact moving-balls outer loop: per iteration k it anchors the surrogate at
// x^k, searches (mu, L) by multiplying with tau until a certified subproblem
// candidate is feasible for g and decreases F sufficiently, then moves.

#include "dcmba/dual_solver.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcmba {

class InfeasibleStartError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the inner loop runs past the step bound implied by measured
/// Lipschitz constants, which points at an inconsistent oracle.
class InnerLoopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IMBAConfig {
  double mu_min = 1e-16;
  double mu_max = 1e16;
  double L_min = 1e-16;
  double L_max = 1e16;
  double M = 1e16;  // requires |A|^2 <= M so that mu I <= Q <= (mu + M) I
  double beta_R = 1e10;
  double beta_F = 1e8;
  double alpha = 1e-6;
  double tau = 2.0;
  /// mu_{0,0}; estimated from a gradient difference quotient when absent.
  std::optional<double> mu_00;
  /// L^{0,0} = L_00_scale * (per-constraint Lipschitz estimate); overridden by L_00.
  double L_00_scale = 0.05;
  std::optional<double> L_00;
  double lip_probe = 1e-4;
  std::uint64_t probe_seed = 0x5EED;
  double eps = 1e-5;
  double eps1 = 1e-7;
  int k_max = 10000;
  int k_min_compl = 500;
  PGlsConfig pgls;
  bool warm_start = true;
  /// Check the inner step bound (see inner_step_bound) once j exceeds this.
  int inner_check_after = 12;
  double lip_safety = 10.0;
  int inner_hard_cap = 400;
  bool record_iterates = false;

  InexactParams inexact() const { return {beta_R, beta_F}; }
  void validate() const;
};

enum class SolveExit { step_tol, compl_tol, iter_cap, stationary_fixed_point };
std::string to_string(SolveExit e);

struct IterateState {
  int k = 0;
  Vector x;
  Vector xi;
  double mu_k = 0.0;
  Vector L_k;
  Vector lambda_k;
  Vector v_k;
  double F_val = 0.0;
  std::shared_ptr<const Anchor> anchor;
  // Initial curvature for the next inner loop (BB or the configured start).
  double mu_next0 = 0.0;
  Vector L_next0;
  std::optional<DualPoint> warm;
};

struct InnerResult {
  Certificate accepted;
  double mu_used = 0.0;
  Vector L_used;
  int j_count = 0;
  int uncertified_steps = 0;  // mu escalations after a subproblem did not certify
  double mu0 = 0.0;
  Vector L0;
  std::vector<int> pgls_iters;
  std::vector<char> certified;
  std::optional<DualPoint> w_final;
  bool stationary = false;
  /// An uncertified candidate was already within eps of x^k; nothing accepted.
  bool precision_floor = false;
};

struct SolveReport {
  int iterations = 0;
  Vector final_x;
  Vector final_lambda;
  Vector final_xi;
  Vector final_v;
  double final_F = 0.0;
  double final_compl = 0.0;
  double final_chi = 0.0;  // chi at the last iterate with refreshed xi
  std::vector<double> F_trace;        // F(x^0), F(x^1), ...
  std::vector<double> gmax_trace;     // max_i g_i(x^k)
  std::vector<double> step_norms;     // |x^{k+1} - x^k|
  std::vector<double> compl_trace;    // [-<lambda^{k+1}, g(x^{k+1})>]_+
  std::vector<double> chi_trace;      // chi(x^{k+1}, xi^k, lambda^{k+1})
  std::vector<int> inner_steps_per_k; // j_k; iteration k solved j_k + 1 subproblems
  std::vector<int> pgls_iters_per_k;  // max PGls iterations over those subproblems
  std::vector<double> mu_trace;
  std::vector<double> Lmax_trace;
  std::vector<double> mu0_per_k;
  std::vector<Vector> L0_per_k;
  std::vector<int> subproblem_pgls;   // every subproblem solved
  std::vector<char> subproblem_certified;
  std::vector<Vector> x_trace;        // only with record_iterates
  double wall_time = 0.0;
  SolveExit exit = SolveExit::iter_cap;
  /// step_tol reached without a final accepted step: the last subproblem
  /// could not be certified and its candidate was within eps of x^k.
  bool precision_floor = false;
};

/// Lipschitz constant of grad f near x from a difference quotient along a
/// seeded random unit direction of length h.
double estimate_lipschitz(const SmoothOracle& f, const Vector& x, double h, std::uint64_t seed);
Vector estimate_constraint_lipschitz(const ConstraintOracle& g, const Vector& x, double h, std::uint64_t seed);

/// Step bound for the inner loop: it stops once j exceeds
///   ceil(max_i log((beta_R + Lg_i) / L0_i) / log tau) + log((Lf + alpha) / mu0) / log tau,
/// each log term floored at zero.
double inner_step_bound(double lip_f, const Vector& lip_g, double mu0, const Vector& L0, double alpha,
                        double beta_R, double tau);

IterateState initial_state(const ProblemSpec& spec, const Vector& x0, const IMBAConfig& cfg);
InnerResult inner_loop(const IterateState& state, const ProblemSpec& spec, const IMBAConfig& cfg);
IterateState outer_step(const IterateState& state, const ProblemSpec& spec, const InnerResult& inner,
                        const IMBAConfig& cfg);
SolveReport run(const ProblemSpec& spec, const Vector& x0, const IMBAConfig& cfg);

struct ChiTerms {
  double stationarity = 0.0;
  double coupling = 0.0;
  double complementarity = 0.0;
  bool coupling_exact = true;
  double value() const;
};

ChiTerms chi_terms(const ProblemSpec& spec, const Vector& x, const Vector& xi, const Vector& lambda,
                   double fallback_step);
/// KKT accuracy measure: max of dist(0, d_x Lagrangian), dist(0, d_xi
/// Lagrangian) and sqrt of the complementarity violation. The middle term is
/// exact for psi = 0 and psi = c|.|; otherwise fallback_step bounds it.
double chi_measure(const ProblemSpec& spec, const Vector& x, const Vector& xi, const Vector& lambda,
                   double fallback_step);

}  // namespace dcmba
