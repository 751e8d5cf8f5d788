#include "helpers.hpp"

#include <doctest.h>

using namespace testutil;

TEST_CASE("grid oracle examples") {
  const Box unit{vec({-1.0, -1.0}), vec({1.0, 1.0})};
  const ProblemSpec ball = quad_spec(Matrix::Identity(2, 2), Vector::Zero(2), {unit_ball(2)});
  OracleResult r = brute_force_min(ball, unit);
  CHECK(r.F_star == doctest::Approx(0.0).scale(1.0));
  CHECK(r.x_star.norm() < 1e-12);

  r = brute_force_min(line_toy(), {vec({-2.0}), vec({2.0})});
  CHECK(r.F_star == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(r.refinement_iters == 40);

  // -x1 + 0.01 |x|_1 on the disc: x* = (1, 0), F* = -0.99
  const ProblemSpec tilt = quad_spec(Matrix::Zero(2, 2), vec({-1.0, 0.0}), {unit_ball(2)}, 0.01);
  r = brute_force_min(tilt, unit);
  CHECK(r.F_star == doctest::Approx(-0.99).epsilon(1e-6));
  CHECK((r.x_star - vec({1.0, 0.0})).norm() < 1e-3);
  CHECK(r.grid_resolution < 1e-4);
}

TEST_CASE("grid oracle errors") {
  const ProblemSpec ball = quad_spec(Matrix::Identity(2, 2), Vector::Zero(2), {unit_ball(2)});
  CHECK_THROWS_AS(brute_force_min(ball, {vec({2.0, 2.0}), vec({3.0, 3.0})}), EmptyGridError);
  const ProblemSpec big = quad_spec(Matrix::Identity(4, 4), Vector::Zero(4), {unit_ball(4)});
  CHECK_THROWS_AS(brute_force_min(big, default_box(Vector::Zero(4))), std::invalid_argument);
}

TEST_CASE("default and feasible boxes") {
  const Box b = default_box(vec({3.0, 4.0}));
  CHECK(b.hi[0] == doctest::Approx(10.0));
  CHECK(b.lo[1] == doctest::Approx(-10.0));
  const QCQPInstance inst = gen_qcqp(QCQPParams::convex_l1(2, 2, 10.0, 3, 2.0));
  const Box fb = qcqp_feasible_box(inst);
  CHECK((inst.x0.array() >= fb.lo.array()).all());
  CHECK((inst.x0.array() <= fb.hi.array()).all());
  // every feasible sample from a wide box lies inside the feasible box
  SplitMix64 rng(9);
  int feasible = 0;
  for (int t = 0; t < 20000; ++t) {
    const Vector x = vec({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
    if (inst.cons.value(x).maxCoeff() > 0.0) continue;
    ++feasible;
    CHECK(((x.array() >= fb.lo.array() - 1e-12) && (x.array() <= fb.hi.array() + 1e-12)).all());
  }
  CHECK(feasible > 0);
  CHECK_THROWS_AS(qcqp_feasible_box(gen_qcqp(QCQPParams::dc_l1l2(2, 1, 10.0, 1))), std::invalid_argument);
}

TEST_CASE("KKT verification") {
  const ProblemSpec s = line_toy();
  CHECK(kkt_verify(s, vec({-1.0}), vec({0.0}), vec({0.5}), 1e-10));
  CHECK_THROWS_AS(kkt_verify(s, vec({-1.0}), vec({0.0}), vec({-0.5}), 1e-10), std::invalid_argument);
  CHECK_FALSE(kkt_verify(s, vec({0.0}), vec({0.0}), vec({0.0}), 1e-3));
  CHECK_FALSE(kkt_verify(s, vec({1.1}), vec({0.0}), vec({0.0}), 1e3));
}

TEST_CASE("linearized DCA constraints") {
  const QCQPInstance inst = gen_qcqp(QCQPParams::dc_l1l2(6, 3, 10.0, 2));
  const LinearizedFactoredConstraints lin(inst.cons, inst.x0);
  CHECK(lin.value(inst.x0) == inst.cons.value(inst.x0));
  CHECK((lin.jacobian(inst.x0) - inst.cons.jacobian(inst.x0)).norm() <= 1e-9 * inst.cons.jacobian(inst.x0).norm());
  SplitMix64 rng(3);
  for (int t = 0; t < 20; ++t) {
    Vector x = inst.x0;
    for (auto& v : x) v += rng.uniform(-0.5, 0.5);
    // linearizing the concave part -P|x|^2 gives an upper bound
    CHECK((lin.value(x) - inst.cons.value(x)).minCoeff() >= -1e-6);
    for (int i = 0; i < inst.m; ++i) {
      const Vector fd = central_diff([&](const Vector& z) { return lin.value(z)[i]; }, x, 1e-5);
      CHECK(rel_err(lin.jacobian(x).row(i).transpose(), fd) < 1e-6);
    }
  }
}

TEST_CASE("DCA agrees with iMBA on convex instances") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const QCQPInstance inst = gen_qcqp(QCQPParams::convex_l1(6, 3, 10.0, seed));
    const ProblemSpec spec = make_problem(inst);
    const SolveReport a = run(spec, inst.x0, {});
    const SolveReport d = dca_run(inst, inst.x0, {});
    CHECK(std::abs(a.final_F - d.final_F) <= 1e-4 * std::abs(a.final_F));
    CHECK(inst.cons.value(d.final_x).maxCoeff() <= 0.0);
  }
}

TEST_CASE("DCA is monotone and feasible on DC instances") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const QCQPInstance inst = gen_qcqp(QCQPParams::dc_l1l2(8, 3, 10.0, seed, 10.0));
    const SolveReport d = dca_run(inst, inst.x0, {});
    CHECK(d.exit != SolveExit::iter_cap);
    for (std::size_t k = 1; k < d.F_trace.size(); ++k) CHECK(d.F_trace[k] <= d.F_trace[k - 1]);
    for (double g : d.gmax_trace) CHECK(g <= 0.0);
    CHECK(inst.cons.value(d.final_x).maxCoeff() <= 0.0);
  }
}

TEST_CASE("DCA input checks") {
  const QCQPInstance inst = small_qcqp(1);
  Vector bad = inst.x0;
  bad *= 1e3;
  CHECK_THROWS_AS(dca_run(inst, bad, {}), InfeasibleStartError);
  DcaConfig cfg;
  cfg.eps = -1.0;
  CHECK_THROWS(cfg.validate());
}
