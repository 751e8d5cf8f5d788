#include "dcmba/dual_solver.hpp"

#include <algorithm>
#include <cmath>

namespace dcmba {

DualPoint DualPoint::zeros(std::size_t m, std::size_t n, Eigen::Index p) {
  return {Vector::Zero(static_cast<Eigen::Index>(m)), Vector::Zero(static_cast<Eigen::Index>(n)),
          Vector::Zero(p)};
}

bool DualPoint::matches(const ModelParams& params) const {
  return lambda.size() == static_cast<Eigen::Index>(params.m()) &&
         eta.size() == static_cast<Eigen::Index>(params.n()) && zeta.size() == params.curv().p();
}

double DualPoint::squared_distance(const DualPoint& o) const {
  return (lambda - o.lambda).squaredNorm() + (eta - o.eta).squaredNorm() + (zeta - o.zeta).squaredNorm();
}

std::string to_string(DualExit e) {
  switch (e) {
    case DualExit::certified: return "certified";
    case DualExit::iter_cap: return "iter_cap";
    case DualExit::stalled: return "stalled";
  }
  return "unknown";
}

namespace {

void require_matches(const ModelParams& params, const DualPoint& w, const char* what) {
  if (!w.matches(params)) throw DimensionError(std::string(what) + ": dual point has wrong shape");
}

// r(w) = b^k + J^T lambda + eta + A^T zeta
Vector dual_residual(const ModelParams& params, const DualPoint& w) {
  Vector r = params.bk() + w.eta;
  if (params.m() > 0) r.noalias() += params.Jk().transpose() * w.lambda;
  if (params.curv().p() > 0) r.noalias() += params.curv().A().transpose() * w.zeta;
  return r;
}

double dual_scale(const ModelParams& params, const DualPoint& w) {
  const double s = params.mu() + (params.m() ? params.L().dot(w.lambda) : 0.0);
  if (!(s > 0.0)) throw std::domain_error("dual: mu + <lambda, L> must be positive");
  return s;
}

}  // namespace

double eval_Theta(const ModelParams& params, const DualPoint& w) {
  require_matches(params, w, "eval_Theta");
  const Vector r = dual_residual(params, w);
  const double s = dual_scale(params, w);
  const double lin_g = params.m() ? w.lambda.dot(params.gk()) : 0.0;
  return r.squaredNorm() / (2.0 * s) - w.eta.dot(params.xk()) - lin_g + 0.5 * w.zeta.squaredNorm() -
         params.Ck();
}

double eval_Xi(const ModelParams& params, const ConvexOracle& phi, const DualPoint& w) {
  require_matches(params, w, "eval_Xi");
  if ((w.lambda.array() < 0.0).any()) return kInf;
  const double conj = phi.conj_value(w.eta);
  if (!std::isfinite(conj)) return kInf;
  return eval_Theta(params, w) + conj;
}

double eval_Xi_rel(const ModelParams& params, const ConvexOracle& phi, const DualPoint& w) {
  require_matches(params, w, "eval_Xi_rel");
  if ((w.lambda.array() < 0.0).any()) return kInf;
  const double fy = phi.fenchel_young_gap(params.xk(), w.eta);
  if (!std::isfinite(fy)) return kInf;
  const Vector r = dual_residual(params, w);
  const double s = dual_scale(params, w);
  const double compl_term = params.m() ? -w.lambda.dot(params.gk()) : 0.0;
  return r.squaredNorm() / (2.0 * s) + fy + compl_term + 0.5 * w.zeta.squaredNorm();
}

DualGradient grad_Theta(const ModelParams& params, const DualPoint& w) {
  require_matches(params, w, "grad_Theta");
  const Vector r = dual_residual(params, w);
  const double s = dual_scale(params, w);
  DualGradient grad;
  const double rr = r.squaredNorm();
  if (params.m() > 0) {
    grad.lambda = (params.Jk() * r) / s - (rr / (2.0 * s * s)) * params.L() - params.gk();
  } else {
    grad.lambda = Vector(0);
  }
  grad.eta = r / s - params.xk();
  grad.zeta = w.zeta;
  if (params.curv().p() > 0) grad.zeta += params.curv().A() * r / s;
  return grad;
}

Vector recover_primal(const ModelParams& params, const DualPoint& w) {
  require_matches(params, w, "recover_primal");
  return params.xk() - dual_residual(params, w) / dual_scale(params, w);
}

double spectral_norm_estimate(const Matrix& M, int iters) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  // Fixed non-uniform start keeps the estimate deterministic.
  Vector v(M.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i % 7);
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < std::max(iters, 1); ++it) {
    const Vector u = M * v;
    Vector z = M.transpose() * u;
    sigma2 = v.dot(z);
    const double nz = z.norm();
    if (nz == 0.0) return 0.0;
    v = z / nz;
  }
  return std::sqrt(std::max(sigma2, 0.0));
}

BlockMetric block_metric(const ModelParams& params, const DualPoint& w0, const PGlsConfig& cfg) {
  BlockMetric M;
  if (!cfg.block_metric) return M;
  M.lambda = params.Jk().rowwise().squaredNorm();
  for (Eigen::Index i = 0; i < M.lambda.size(); ++i) {
    if (!(M.lambda[i] > 0.0)) M.lambda[i] = 1.0;
  }
  const double na = spectral_norm_estimate(params.curv().A(), cfg.power_iters);
  M.zeta = dual_scale(params, w0) + na * na;
  return M;
}

double initial_tau(const ModelParams& params, const PGlsConfig& cfg) {
  double tau = cfg.tau0 ? *cfg.tau0 : 0.0;
  if (!cfg.tau0) {
    if (cfg.block_metric) {
      tau = cfg.tau0_scale;
    } else {
      const double nj = spectral_norm_estimate(params.Jk(), cfg.power_iters);
      tau = cfg.tau0_scale * nj * nj;
    }
  }
  return std::clamp(tau, cfg.tau_min, cfg.tau_max);
}

PGlsStep pgls_step(const ModelParams& params, const ConvexOracle& phi, const DualPoint& w, double xi_w,
                   double tau_l0, const PGlsConfig& cfg, const BlockMetric& metric) {
  const DualGradient grad = grad_Theta(params, w);
  PGlsStep out;
  double tau = tau_l0;
  for (int nu = 0;; ++nu) {
    const Vector tl = metric.lambda.size() ? Vector(metric.lambda.cwiseInverse() / tau)
                                            : Vector::Constant(w.lambda.size(), 1.0 / tau);
    const double te = 1.0 / (tau * metric.eta);
    const double tz = 1.0 / (tau * metric.zeta);
    DualPoint trial;
    trial.lambda = (w.lambda - tl.cwiseProduct(grad.lambda)).cwiseMax(0.0);
    trial.eta = phi.conj_prox(te, w.eta - te * grad.eta);
    trial.zeta = w.zeta - tz * grad.zeta;
    const double xi_trial = eval_Xi_rel(params, phi, trial);
    const double dist2 = (trial.lambda - w.lambda).cwiseAbs2().cwiseQuotient(tl).sum() / tau +
                         metric.eta * (trial.eta - w.eta).squaredNorm() +
                         metric.zeta * (trial.zeta - w.zeta).squaredNorm();
    if (xi_trial <= xi_w - 0.5 * cfg.delta * tau * dist2) {
      out.w_next = std::move(trial);
      out.xi_next = xi_trial;
      out.tau_used = tau;
      out.nu = nu;
      return out;
    }
    if (nu >= cfg.max_backtracks) {
      out.w_next = w;
      out.xi_next = xi_w;
      out.tau_used = tau;
      out.nu = nu;
      out.stalled = true;
      return out;
    }
    tau *= cfg.rho;
  }
}

void PGlsConfig::validate() const {
  if (!(tau_min > 0.0 && tau_min <= tau_max && rho > 1.0 && delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("PGlsConfig: need 0 < tau_min <= tau_max, rho > 1, 0 < delta < 1");
  }
  if (l_max < 1 || max_backtracks < 0 || power_iters < 1 || !(tau0_scale > 0.0) || (tau0 && !(*tau0 > 0.0))) {
    throw std::invalid_argument("PGlsConfig: need l_max >= 1, max_backtracks >= 0, power_iters >= 1, positive tau0");
  }
}

DualReport solve_dual(const ModelParams& params, const ConvexOracle& phi, const PGlsConfig& cfg,
                      const InexactParams& inexact, const std::optional<DualPoint>& w0) {
  DualReport rep;
  DualPoint w = (w0 && w0->matches(params)) ? *w0 : DualPoint::zeros(params.m(), params.n(), params.curv().p());
  double xi_w = eval_Xi_rel(params, phi, w);
  if (!std::isfinite(xi_w)) {
    w = DualPoint::zeros(params.m(), params.n(), params.curv().p());
    xi_w = eval_Xi_rel(params, phi, w);
  }

  const BlockMetric metric = block_metric(params, w, cfg);
  double tau0 = initial_tau(params, cfg);
  bool have_best = false;
  bool best_feasible = false;
  Certificate best;

  for (int l = 0; l < cfg.l_max; ++l) {
    const Vector xhat = recover_primal(params, w);
    PGlsStep step = pgls_step(params, phi, w, xi_w, tau0, cfg, metric);
    rep.backtracks += step.nu;
    rep.last_tau = step.tau_used;
    ++rep.pgls_iters;
    if (step.stalled) {
      rep.exit = DualExit::stalled;
      break;
    }

    // eta^{l+1} is a subgradient of phi at s = (eta^l - eta^{l+1}) / t + xhat^l with
    // t the eta step, so (s, eta^{l+1}, lambda^{l+1}) has v in d phi(y) exactly.
    const Vector y = (step.tau_used * metric.eta) * (w.eta - step.w_next.eta) + xhat;
    w = std::move(step.w_next);
    xi_w = step.xi_next;
    tau0 = std::clamp(step.tau_used / cfg.rho, cfg.tau_min, cfg.tau_max);

    Certificate cert = check_inexact_rel(params, phi, y, w.eta, w.lambda, xi_w, inexact);
    if (cert.passed) {
      best = std::move(cert);
      have_best = true;
      rep.exit = DualExit::certified;
      break;
    }
    const Vector Gy = eval_G(params, y);
    const bool g_feasible = Gy.size() == 0 || Gy.maxCoeff() <= 0.0;
    if (!have_best || (g_feasible && (!best_feasible || cert.Fkj_y < best.Fkj_y))) {
      best = std::move(cert);
      have_best = true;
      best_feasible = g_feasible;
    }
  }

  rep.w_final = w;
  rep.lower_bound = params.Ck() + params.anchor().phik - xi_w;
  if (have_best) {
    rep.primal = best.y;
    rep.v = best.v;
    rep.lambda = best.lambda;
    rep.certificate = std::move(best);
  } else {
    rep.primal = params.xk();
    rep.v = w.eta;
    rep.lambda = w.lambda;
  }
  return rep;
}

}  // namespace dcmba
