#pragma once

#include "dcmba/baseline.hpp"
#include "dcmba/driver.hpp"
#include "dcmba/instances.hpp"

#include <functional>
#include <initializer_list>

namespace testutil {

using namespace dcmba;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double t : v) out[i++] = t;
  return out;
}

inline Matrix mat1(double a) { return Matrix::Constant(1, 1, a); }

/// min <q, x> + 0.5 x^T H x + phi_w |x|_1 - psi_w |x|  s.t. pieces, with A = 0.
inline ProblemSpec quad_spec(Matrix H, Vector q, std::vector<QuadraticConstraints::Piece> pieces, double phi_w = 0.0,
                             double psi_w = 0.0) {
  ProblemSpec s;
  s.n = static_cast<std::size_t>(q.size());
  s.m = pieces.size();
  s.f = std::make_shared<QuadraticOracle>(std::move(H), std::move(q));
  if (phi_w > 0.0) {
    s.phi = std::make_shared<L1Oracle>(phi_w);
  } else {
    s.phi = std::make_shared<ZeroConvexOracle>();
  }
  s.psi = std::make_shared<L2CorrOracle>(psi_w);
  s.g = std::make_shared<QuadraticConstraints>(std::move(pieces));
  return s;
}

/// f(x) = x, g(x) = x^2 - 1 on the line: x* = -1, F* = -1, lambda* = 1/2.
inline ProblemSpec line_toy() {
  return quad_spec(mat1(0.0), vec({1.0}), {{mat1(2.0), vec({0.0}), -1.0}});
}

/// Unit-disc constraint |x|^2 - 1 <= 0 in R^n.
inline QuadraticConstraints::Piece unit_ball(int n) {
  return {2.0 * Matrix::Identity(n, n), Vector::Zero(n), -1.0};
}

inline Vector central_diff(const std::function<double(const Vector&)>& fn, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (fn(a) - fn(b)) / (2.0 * h);
  }
  return g;
}

inline double rel_err(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

/// Small QCQP for model-level tests.
inline QCQPInstance small_qcqp(std::uint64_t seed, int n = 6, int m = 3, double P = 0.0, double psi = 0.0) {
  QCQPParams p = QCQPParams::convex_l1(n, m, 10.0, seed, 2.0);
  p.P_scale = P;
  p.psi_weight = psi;
  return gen_qcqp(p);
}

/// Surrogate at x0 of a small QCQP with random mu and L.
inline ModelParams random_model(std::uint64_t seed, const ProblemSpec& spec, const Vector& x0) {
  SplitMix64 rng(seed);
  const Vector xi = spec.psi->xi(x0);
  auto anchor = Anchor::build(spec, x0, xi);
  Vector L(spec.m);
  for (Eigen::Index i = 0; i < L.size(); ++i) L[i] = rng.uniform(0.5, 5.0);
  return ModelParams(anchor, rng.uniform(0.5, 5.0), L);
}

inline DualPoint random_dual(SplitMix64& rng, const ModelParams& p, double eta_box) {
  DualPoint w = DualPoint::zeros(p.m(), p.n(), p.curv().p());
  for (Eigen::Index i = 0; i < w.lambda.size(); ++i) w.lambda[i] = rng.uniform(0.0, 2.0);
  for (Eigen::Index i = 0; i < w.eta.size(); ++i) w.eta[i] = rng.uniform(-eta_box, eta_box);
  for (Eigen::Index i = 0; i < w.zeta.size(); ++i) w.zeta[i] = rng.uniform(-1.0, 1.0);
  return w;
}

}  // namespace testutil
