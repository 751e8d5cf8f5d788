#include "helpers.hpp"

#include <doctest.h>

using namespace testutil;

TEST_CASE("l1 prox is soft thresholding") {
  L1Oracle phi(0.5);
  const Vector p = phi.prox(2.0, vec({3.0, -0.5, -2.0, 1.0}));
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == doctest::Approx(-1.0));
  CHECK(p[3] == 0.0);
}

TEST_CASE("l1 Moreau decomposition") {
  L1Oracle phi(0.3);
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(5);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    const double t = rng.uniform(0.1, 3.0);
    // x = prox_{t phi}(x) + t prox_{phi^*/t}(x / t)
    const Vector rhs = phi.prox(t, x) + t * phi.conj_prox(1.0 / t, x / t);
    CHECK((rhs - x).norm() < 1e-14);
  }
}

TEST_CASE("l1 conjugate is the box indicator") {
  L1Oracle phi(0.25);
  CHECK(phi.conj_value(vec({0.25, -0.1})) == 0.0);
  CHECK(std::isinf(phi.conj_value(vec({0.2500001, 0.0}))));
}

TEST_CASE("Fenchel-Young gap matches its definition and vanishes on the subdifferential") {
  L1Oracle phi(0.4);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(4), eta(4);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : eta) v = rng.uniform(-0.4, 0.4);
    const double direct = phi.value(x) + phi.conj_value(eta) - eta.dot(x);
    CHECK(phi.fenchel_young_gap(x, eta) >= 0.0);
    CHECK(phi.fenchel_young_gap(x, eta) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(phi.fenchel_young_gap(x, phi.subgradient(x)) == doctest::Approx(0.0));
  }
  CHECK(std::isinf(phi.fenchel_young_gap(vec({1.0}), vec({0.5}))));
  ZeroConvexOracle zero;
  CHECK(zero.fenchel_young_gap(vec({1.0, 2.0}), vec({0.0, 0.0})) == 0.0);
  CHECK(std::isinf(zero.fenchel_young_gap(vec({1.0}), vec({1e-300}))));
}

TEST_CASE("l1 subdifferential distance") {
  L1Oracle phi(1.0);
  // x_1 > 0 fixes u_1 = 1; x_2 = 0 allows [-1, 1]
  CHECK(phi.subdiff_distance(vec({2.0, 0.0}), vec({1.0, 0.5})) == 0.0);
  CHECK(phi.subdiff_distance(vec({2.0, 0.0}), vec({0.0, 3.0})) == doctest::Approx(std::sqrt(1.0 + 4.0)));
}

TEST_CASE("l2 correction oracle") {
  L2CorrOracle psi(0.5);
  const Vector x = vec({3.0, 4.0});
  CHECK(psi.value(x) == doctest::Approx(2.5));
  const Vector xi = psi.xi(x);
  CHECK(xi[0] == doctest::Approx(-0.3));
  CHECK(xi[1] == doctest::Approx(-0.4));
  // -xi is a subgradient of psi: psi(z) >= psi(x) - <xi, z - x>
  SplitMix64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Vector z = vec({rng.uniform(-5, 5), rng.uniform(-5, 5)});
    CHECK(psi.value(z) >= psi.value(x) - xi.dot(z - x) - 1e-12);
  }
  CHECK(psi.xi(Vector::Zero(2)).norm() == doctest::Approx(0.5));
  // d psi^*(-xi) is the ray through x when |xi| = c
  CHECK(*psi.conj_subdiff_distance(x, xi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(*psi.conj_subdiff_distance(vec({1.0, 0.0}), vec({0.0, 0.0})) == doctest::Approx(1.0));
  L2CorrOracle none(0.0);
  CHECK(none.xi(x).norm() == 0.0);
  CHECK(*none.conj_subdiff_distance(x, none.xi(x)) == 0.0);
}

TEST_CASE("objective and feasibility") {
  ProblemSpec s = line_toy();
  s.validate();
  CHECK(eval_F(s, vec({-1.0})) == doctest::Approx(-1.0));
  CHECK(std::isinf(eval_F(s, vec({1.5}))));
  CHECK(eval_objective(s, vec({1.5})) == doctest::Approx(1.5));
  CHECK(check_feasible(s, vec({1.0}), 0.0));
  CHECK_THROWS_AS(eval_F(s, vec({1.0, 2.0})), DimensionError);
  s.m = 2;
  CHECK_THROWS(s.validate());
}

TEST_CASE("quadratic oracles match finite differences") {
  SplitMix64 rng(8);
  Matrix H = Matrix::Random(3, 3);
  QuadraticOracle f(H, vec({1.0, -2.0, 0.5}), 0.7);
  const Vector x = vec({0.3, -0.2, 1.1});
  const Vector fd = central_diff([&](const Vector& z) { return f.value(z); }, x, 1e-6);
  CHECK(rel_err(f.gradient(x), fd) < 1e-8);
}
