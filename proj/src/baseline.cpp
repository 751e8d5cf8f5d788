#include "dcmba/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dcmba {

namespace {

/// f(x) - <c, x>
class TiltedObjective final : public SmoothOracle {
 public:
  TiltedObjective(std::shared_ptr<const SmoothOracle> f, Vector c) : f_(std::move(f)), c_(std::move(c)) {}
  double value(const Vector& x) const override { return f_->value(x) - c_.dot(x); }
  Vector gradient(const Vector& x) const override { return f_->gradient(x) - c_; }

 private:
  std::shared_ptr<const SmoothOracle> f_;
  Vector c_;
};

}  // namespace

IMBAConfig dca_default_sub_config() {
  IMBAConfig c;
  c.eps = 1e-8;
  return c;
}

void DcaConfig::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("DcaConfig: eps must be positive");
  if (k_max < 0) throw std::invalid_argument("DcaConfig: k_max must be nonnegative");
  sub_cfg.validate();
}

LinearizedFactoredConstraints::LinearizedFactoredConstraints(FactoredConstraintSet cons, Vector xk)
    : cons_(std::move(cons)), xk_(std::move(xk)) {}

Vector LinearizedFactoredConstraints::value(const Vector& x) const {
  const double P = cons_.P_scale;
  const Vector dx = x - xk_;
  Vector out(cons_.size());
  for (int i = 0; i < cons_.size(); ++i) {
    // grouped like g_i so that the value at xk equals g_i(xk) bit for bit
    out[i] = ((cons_.B[i] * x + cons_.h[i]).squaredNorm() - P * xk_.squaredNorm()) - cons_.d2[i] -
             2.0 * P * xk_.dot(dx);
  }
  return out;
}

Matrix LinearizedFactoredConstraints::jacobian(const Vector& x) const {
  Matrix J(cons_.size(), x.size());
  for (int i = 0; i < cons_.size(); ++i) {
    J.row(i) = (2.0 * (cons_.B[i].transpose() * (cons_.B[i] * x + cons_.h[i])) - (2.0 * cons_.P_scale) * xk_).transpose();
  }
  return J;
}

SolveReport dca_run(const QCQPInstance& inst, const Vector& x0, const DcaConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const ProblemSpec spec = make_problem(inst);
  require_size(x0, inst.n, "dca_run(x0)");
  if (max_violation(spec.g->value(x0)) > 0.0) throw InfeasibleStartError("dca_run: x0 violates g <= 0");

  SolveReport rep;
  Vector x = x0;
  Vector lambda = Vector::Zero(inst.m);
  Vector xi = spec.psi->xi(x);
  Vector v = spec.phi->subgradient(x);
  double F = eval_objective(spec, x);
  double last_step = 0.0;
  rep.F_trace.push_back(F);
  rep.gmax_trace.push_back(max_violation(spec.g->value(x)));
  if (cfg.sub_cfg.record_iterates) rep.x_trace.push_back(x);
  rep.exit = SolveExit::iter_cap;

  for (int k = 0;; ++k) {
    if (k >= cfg.k_max) break;
    xi = spec.psi->xi(x);  // d(-psi); the DCA subgradient is -xi
    ProblemSpec sub;
    sub.n = spec.n;
    sub.m = spec.m;
    sub.f = std::make_shared<TiltedObjective>(spec.f, -xi);
    sub.phi = spec.phi;
    sub.psi = std::make_shared<L2CorrOracle>(0.0);
    sub.g = std::make_shared<LinearizedFactoredConstraints>(inst.cons, x);
    sub.curvature = spec.curvature;

    IMBAConfig sub_cfg = cfg.sub_cfg;
    sub_cfg.record_iterates = false;
    const SolveReport s = run(sub, x, sub_cfg);
    rep.inner_steps_per_k.push_back(s.iterations);
    rep.pgls_iters_per_k.push_back(s.pgls_iters_per_k.empty()
                                       ? 0
                                       : *std::max_element(s.pgls_iters_per_k.begin(), s.pgls_iters_per_k.end()));
    if (s.exit == SolveExit::iter_cap) break;

    const Vector gx = spec.g->value(s.final_x);
    const double step = (s.final_x - x).norm();
    lambda = s.final_lambda;
    v = s.final_v;
    const double compl_v = lambda.size() ? pos(-lambda.dot(gx)) : 0.0;
    rep.step_norms.push_back(step);
    x = s.final_x;
    F = eval_objective(spec, x);
    rep.F_trace.push_back(F);
    rep.gmax_trace.push_back(max_violation(gx));
    rep.compl_trace.push_back(compl_v);
    rep.chi_trace.push_back(chi_measure(spec, x, xi, lambda, step));
    if (cfg.sub_cfg.record_iterates) rep.x_trace.push_back(x);
    rep.iterations = k + 1;
    last_step = step;
    if (step <= cfg.eps) {
      rep.exit = SolveExit::step_tol;
      break;
    }
  }

  rep.final_x = x;
  rep.final_lambda = lambda;
  rep.final_xi = spec.psi->xi(x);
  rep.final_v = v;
  rep.final_F = F;
  rep.final_compl = lambda.size() ? pos(-lambda.dot(spec.g->value(x))) : 0.0;
  rep.final_chi = chi_measure(spec, x, rep.final_xi, lambda, last_step);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

Box default_box(const Vector& x0) {
  const double r = 2.0 * std::max(1.0, x0.norm());
  return {Vector::Constant(x0.size(), -r), Vector::Constant(x0.size(), r)};
}

Box qcqp_feasible_box(const QCQPInstance& inst) {
  if (inst.cons.P_scale != 0.0) throw std::invalid_argument("qcqp_feasible_box: needs P_scale = 0");
  Box box{Vector::Constant(inst.n, -kInf), Vector::Constant(inst.n, kInf)};
  for (int i = 0; i < inst.m; ++i) {
    // |B x + h| <= d  <=>  x = B^{-1}(u - h), |u| <= d
    const Matrix Binv = inst.cons.B[i].inverse();
    const Vector c = -Binv * inst.cons.h[i];
    const double d = std::sqrt(std::max(0.0, inst.cons.d2[i]));
    for (int j = 0; j < inst.n; ++j) {
      const double r = d * Binv.row(j).norm();
      box.lo[j] = std::max(box.lo[j], c[j] - r);
      box.hi[j] = std::min(box.hi[j], c[j] + r);
    }
  }
  return box;
}

namespace {

struct GridBest {
  bool found = false;
  Vector x;
  double F = kInf;
};

GridBest scan_grid(const ProblemSpec& spec, const Vector& lo, const Vector& hi, int pts) {
  const int n = static_cast<int>(lo.size());
  std::vector<int> idx(n, 0);
  Vector x(n);
  GridBest best;
  for (;;) {
    for (int j = 0; j < n; ++j) x[j] = pts == 1 ? 0.5 * (lo[j] + hi[j]) : lo[j] + (hi[j] - lo[j]) * idx[j] / (pts - 1);
    if (max_violation(spec.g->value(x)) <= 0.0) {
      const double F = eval_objective(spec, x);
      if (F < best.F) {
        best.found = true;
        best.F = F;
        best.x = x;
      }
    }
    int j = 0;
    while (j < n && ++idx[j] == pts) idx[j++] = 0;
    if (j == n) break;
  }
  return best;
}

}  // namespace

OracleResult brute_force_min(const ProblemSpec& spec, const Box& box, int grid_pts, int refine_iters) {
  spec.validate();
  const int n = static_cast<int>(spec.n);
  if (n > 3) throw std::invalid_argument("brute_force_min: n must be at most 3");
  require_size(box.lo, n, "brute_force_min(lo)");
  require_size(box.hi, n, "brute_force_min(hi)");
  if (!((box.hi - box.lo).array() >= 0.0).all() || !box.lo.allFinite() || !box.hi.allFinite()) {
    throw std::invalid_argument("brute_force_min: box must be finite with lo <= hi");
  }
  if (grid_pts <= 0) grid_pts = n <= 2 ? 201 : 61;
  if (grid_pts < 2) throw std::invalid_argument("brute_force_min: need at least 2 grid points per axis");

  GridBest best = scan_grid(spec, box.lo, box.hi, grid_pts);
  if (!best.found) throw EmptyGridError("brute_force_min: no feasible grid point; widen the box or refine the grid");
  Vector half = 0.25 * (box.hi - box.lo);
  Vector spacing = (box.hi - box.lo) / (grid_pts - 1);

  // Each round re-grids a box centred on the incumbent with half the previous width.
  OracleResult res;
  for (int r = 0; r < refine_iters; ++r) {
    const Vector lo = (best.x - half).cwiseMax(box.lo);
    const Vector hi = (best.x + half).cwiseMin(box.hi);
    GridBest cand = scan_grid(spec, lo, hi, grid_pts);
    if (cand.found && cand.F <= best.F) best = std::move(cand);
    spacing = (hi - lo) / (grid_pts - 1);
    half *= 0.5;
    ++res.refinement_iters;
  }
  res.x_star = best.x;
  res.F_star = best.F;
  res.grid_resolution = spacing.maxCoeff();
  return res;
}

bool kkt_verify(const ProblemSpec& spec, const Vector& x, const Vector& xi, const Vector& lambda, double tol) {
  require_size(lambda, static_cast<std::ptrdiff_t>(spec.m), "kkt_verify(lambda)");
  if ((lambda.array() < 0.0).any()) throw std::invalid_argument("kkt_verify: lambda must be >= 0");
  if (max_violation(spec.g->value(x)) > 0.0) return false;
  return chi_measure(spec, x, xi, lambda, 0.0) <= tol;
}

}  // namespace dcmba
