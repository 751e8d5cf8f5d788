#include "helpers.hpp"

#include <doctest.h>

#include <numeric>

using namespace testutil;

namespace {

IMBAConfig tight(double eps = 1e-8, int k_min_compl = 500) {
  IMBAConfig cfg;
  cfg.eps = eps;
  cfg.k_min_compl = k_min_compl;
  return cfg;
}

void check_run_invariants(const ProblemSpec& spec, const SolveReport& rep, double alpha) {
  REQUIRE(rep.F_trace.size() == static_cast<std::size_t>(rep.iterations) + 1);
  for (double g : rep.gmax_trace) CHECK(g <= 0.0);
  double sum_sq = 0.0;
  for (int k = 0; k < rep.iterations; ++k) {
    const double d = rep.step_norms[k];
    CHECK(rep.F_trace[k + 1] <= rep.F_trace[k] - 0.5 * alpha * d * d + 1e-12 * std::abs(rep.F_trace[k]));
    sum_sq += d * d;
  }
  const double drop = rep.F_trace.front() - rep.F_trace.back();
  CHECK(sum_sq <= 2.0 * drop / alpha * (1.0 + 1e-9) + 1e-12);
  for (double mu : rep.mu_trace) CHECK(mu <= 1e16);
  for (double L : rep.Lmax_trace) CHECK(L <= 1e16);
  CHECK(eval_F(spec, rep.final_x) == doctest::Approx(rep.final_F).epsilon(1e-14));
}

}  // namespace

TEST_CASE("infeasible start is rejected") {
  const ProblemSpec s = line_toy();
  CHECK_THROWS_AS(run(s, vec({1.5}), {}), InfeasibleStartError);
  CHECK_THROWS_AS(run(s, vec({0.0, 0.0}), {}), DimensionError);
}

TEST_CASE("config validation") {
  IMBAConfig cfg;
  cfg.tau = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.mu_min = 2.0;
  cfg.mu_max = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.eps = 0.0;
  CHECK_THROWS(cfg.validate());
  CHECK_NOTHROW(IMBAConfig{}.validate());
}

TEST_CASE("line toy converges to x = -1 with lambda = 1/2") {
  const ProblemSpec s = line_toy();
  const SolveReport rep = run(s, vec({0.0}), tight());
  CHECK(rep.final_x[0] == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(rep.final_F == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(rep.final_lambda[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rep.exit != SolveExit::iter_cap);
  check_run_invariants(s, rep, 1e-6);
}

TEST_CASE("two-dimensional convex QCQP against the grid oracle and closed form") {
  // min 0.5 |x|^2 + <q, x> over the unit disc with |q| > 1: x* = -q / |q|,
  // lambda* = (|q| - 1) / 2.
  const Vector q = vec({1.0, -2.0});
  const ProblemSpec s = quad_spec(Matrix::Identity(2, 2), q, {unit_ball(2)});
  const SolveReport rep = run(s, vec({0.0, 0.0}), tight());
  const Vector xs = -q / q.norm();
  const double lam = 0.5 * (q.norm() - 1.0);
  const OracleResult ref = brute_force_min(s, {vec({-1.0, -1.0}), vec({1.0, 1.0})});
  CHECK((ref.x_star - xs).norm() < 1e-4);
  CHECK((rep.final_x - xs).norm() < 1e-4);
  CHECK(rep.final_F <= ref.F_star + 1e-9);
  CHECK(rep.final_lambda[0] == doctest::Approx(lam).epsilon(1e-3));
  CHECK(rep.final_chi <= 1e-3);
  CHECK(kkt_verify(s, rep.final_x, rep.final_xi, rep.final_lambda, 1e-3));
  check_run_invariants(s, rep, 1e-6);
}

TEST_CASE("with an inactive constant constraint the method is a proximal gradient method") {
  // f = 0.5 |x - c|^2, phi = 0.3 |x|_1, g = -1: x* = soft(c, 0.3).
  const Vector c = vec({1.0, -0.2});
  const ProblemSpec s = quad_spec(Matrix::Identity(2, 2), -c, {{Matrix::Zero(2, 2), Vector::Zero(2), -1.0}}, 0.3);
  const SolveReport rep = run(s, vec({0.5, 0.5}), tight());
  CHECK(rep.final_x[0] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(std::abs(rep.final_x[1]) < 1e-6);
  const OracleResult ref = brute_force_min(s, {vec({-2.0, -2.0}), vec({2.0, 2.0})});
  CHECK((ref.x_star - rep.final_x).norm() < 1e-4);
  CHECK(rep.final_F <= ref.F_star + 1e-10);
  CHECK(rep.final_lambda[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("run invariants on random convex and DC instances") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (double P : {0.0, 1e5}) {
      QCQPParams prm = P > 0.0 ? QCQPParams::dc_l1l2(8, 3, 10.0, seed, 10.0) : QCQPParams::convex_l1(8, 3, 10.0, seed);
      const QCQPInstance inst = gen_qcqp(prm);
      const ProblemSpec spec = make_problem(inst);
      IMBAConfig cfg;
      cfg.k_min_compl = 20;
      const SolveReport rep = run(spec, inst.x0, cfg);
      CHECK(rep.exit != SolveExit::iter_cap);
      check_run_invariants(spec, rep, cfg.alpha);
      CHECK(rep.inner_steps_per_k.size() == static_cast<std::size_t>(rep.iterations));
      // iteration k solved j_k + 1 subproblems
      const int solved = std::accumulate(rep.inner_steps_per_k.begin(), rep.inner_steps_per_k.end(), 0) +
                         rep.iterations;
      CHECK(rep.subproblem_pgls.size() >= static_cast<std::size_t>(solved));
    }
  }
}

TEST_CASE("runs are deterministic") {
  const QCQPInstance inst = small_qcqp(17, 10, 4);
  const ProblemSpec spec = make_problem(inst);
  IMBAConfig cfg;
  cfg.k_min_compl = 10;
  const SolveReport a = run(spec, inst.x0, cfg), b = run(spec, inst.x0, cfg);
  CHECK(a.F_trace == b.F_trace);
  CHECK(a.final_x == b.final_x);
  CHECK(a.subproblem_pgls == b.subproblem_pgls);
}

TEST_CASE("record_iterates reproduces the F trace") {
  const QCQPInstance inst = small_qcqp(4, 6, 2);
  const ProblemSpec spec = make_problem(inst);
  IMBAConfig cfg;
  cfg.record_iterates = true;
  cfg.k_min_compl = 10;
  const SolveReport rep = run(spec, inst.x0, cfg);
  REQUIRE(rep.x_trace.size() == rep.F_trace.size());
  for (std::size_t k = 0; k < rep.x_trace.size(); ++k) CHECK(eval_F(spec, rep.x_trace[k]) == rep.F_trace[k]);
}

TEST_CASE("chi measure examples") {
  const ProblemSpec s = line_toy();
  // exact KKT triple: 1 + 2 lambda x = 0 at x = -1
  CHECK(chi_measure(s, vec({-1.0}), vec({0.0}), vec({0.5}), 0.0) == doctest::Approx(0.0));
  // lambda = 0 at an interior point: only stationarity remains, |f'| = 1
  const ChiTerms t = chi_terms(s, vec({0.3}), vec({0.0}), vec({0.0}), 0.0);
  CHECK(t.complementarity == 0.0);
  CHECK(t.stationarity == doctest::Approx(1.0));
  CHECK(t.value() == doctest::Approx(1.0));
  // complementarity term is sqrt(-lambda g): lambda = 1 at x = 0 gives 1
  CHECK(chi_terms(s, vec({0.0}), vec({0.0}), vec({1.0}), 0.0).complementarity == doctest::Approx(1.0));
}

TEST_CASE("inner step bound and Lipschitz probe") {
  // ceil(log2(8)) + log2(8)
  CHECK(inner_step_bound(8.0, vec({6.0}), 1.0, vec({1.0}), 0.0, 2.0, 2.0) == doctest::Approx(6.0));
  // terms below one are floored at zero
  CHECK(inner_step_bound(0.5, vec({0.0}), 1.0, vec({1.0}), 0.0, 0.5, 2.0) == doctest::Approx(0.0));
  QuadraticOracle f(2.0 * Matrix::Identity(3, 3), Vector::Zero(3));
  CHECK(estimate_lipschitz(f, vec({0.1, 0.2, 0.3}), 1e-4, 1) == doctest::Approx(2.0).epsilon(1e-8));
  Matrix H = Matrix::Zero(3, 3);
  H.diagonal() << 1.0, 2.0, 3.0;
  QuadraticOracle h(H, Vector::Zero(3));
  const double est = estimate_lipschitz(h, vec({0.0, 0.0, 0.0}), 1e-4, 7);
  CHECK(est >= 1.0 - 1e-8);
  CHECK(est <= 3.0 + 1e-8);
  CHECK(est == estimate_lipschitz(h, vec({0.0, 0.0, 0.0}), 1e-4, 7));
}
