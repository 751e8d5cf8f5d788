#include "dcmba/driver.hpp"

#include "dcmba/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace dcmba {

void IMBAConfig::validate() const {
  if (!(mu_min > 0.0 && mu_min <= mu_max)) throw std::invalid_argument("IMBAConfig: need 0 < mu_min <= mu_max");
  if (!(L_min > 0.0 && L_min <= L_max)) throw std::invalid_argument("IMBAConfig: need 0 < L_min <= L_max");
  if (!(tau > 1.0)) throw std::invalid_argument("IMBAConfig: tau must exceed 1");
  if (!(beta_R > 0.0 && beta_F > 0.0 && alpha > 0.0)) {
    throw std::invalid_argument("IMBAConfig: beta_R, beta_F and alpha must be positive");
  }
  if (!(M >= 0.0)) throw std::invalid_argument("IMBAConfig: M must be nonnegative");
  if (!(eps > 0.0 && eps1 > 0.0)) throw std::invalid_argument("IMBAConfig: tolerances must be positive");
  if (k_max < 0) throw std::invalid_argument("IMBAConfig: k_max must be nonnegative");
  pgls.validate();
}

std::string to_string(SolveExit e) {
  switch (e) {
    case SolveExit::step_tol: return "step_tol";
    case SolveExit::compl_tol: return "compl_tol";
    case SolveExit::iter_cap: return "iter_cap";
    case SolveExit::stationary_fixed_point: return "stationary_fixed_point";
  }
  return "unknown";
}

namespace {

Vector random_unit(Eigen::Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.normal();
  const double nu = u.norm();
  if (nu == 0.0) {
    u.setZero();
    u[0] = 1.0;
    return u;
  }
  return u / nu;
}

void check_curvature_cap(const Anchor& a, const IMBAConfig& cfg) {
  if (a.A->rows() == 0) return;
  const double nA = spectral_norm_estimate(*a.A, 30);
  // Power iteration underestimates; a few percent of headroom is harmless.
  if (nA * nA > cfg.M * 1.05) {
    std::ostringstream os;
    os << "curvature operator violates Q <= (mu + M) I: |A|^2 ~ " << nA * nA << " > M = " << cfg.M;
    throw std::invalid_argument(os.str());
  }
}

Vector clip(Vector v, double lo, double hi) { return v.cwiseMax(lo).cwiseMin(hi); }

ChiTerms chi_from(const ProblemSpec& spec, const Vector& x, const Vector& gradf, const Vector& gx, const Matrix& J,
                  const Vector& xi, const Vector& lambda, double fallback_step) {
  ChiTerms t;
  Vector smooth = gradf + xi;
  if (lambda.size() > 0) smooth.noalias() += J.transpose() * lambda;
  t.stationarity = spec.phi->subdiff_distance(x, -smooth);
  if (auto d = spec.psi->conj_subdiff_distance(x, xi)) {
    t.coupling = *d;
  } else {
    t.coupling = fallback_step;
    t.coupling_exact = false;
  }
  t.complementarity = lambda.size() ? std::sqrt(pos(-gx.dot(lambda))) : 0.0;
  return t;
}

}  // namespace

double ChiTerms::value() const { return std::max({stationarity, coupling, complementarity}); }

double estimate_lipschitz(const SmoothOracle& f, const Vector& x, double h, std::uint64_t seed) {
  const Vector u = random_unit(x.size(), seed);
  return (f.gradient(x + h * u) - f.gradient(x)).norm() / h;
}

Vector estimate_constraint_lipschitz(const ConstraintOracle& g, const Vector& x, double h, std::uint64_t seed) {
  const Vector u = random_unit(x.size(), seed);
  const Matrix dJ = g.jacobian(x + h * u) - g.jacobian(x);
  return dJ.rowwise().norm() / h;
}

double inner_step_bound(double lip_f, const Vector& lip_g, double mu0, const Vector& L0, double alpha,
                        double beta_R, double tau) {
  require_size(L0, lip_g.size(), "inner_step_bound");
  const double lt = std::log(tau);
  double jL = 0.0;
  for (Eigen::Index i = 0; i < lip_g.size(); ++i) {
    jL = std::max(jL, std::ceil(std::log((beta_R + lip_g[i]) / L0[i]) / lt));
  }
  const double jmu = std::max(0.0, std::log((lip_f + alpha) / mu0) / lt);
  return jL + jmu;
}

IterateState initial_state(const ProblemSpec& spec, const Vector& x0, const IMBAConfig& cfg) {
  spec.validate();
  cfg.validate();
  require_size(x0, static_cast<std::ptrdiff_t>(spec.n), "run(x0)");
  require_finite(x0, "run(x0)");
  const Vector g0 = spec.g->value(x0);
  if (max_violation(g0) > 0.0) {
    std::ostringstream os;
    os << "starting point is infeasible: max_i g_i(x0) = " << max_violation(g0);
    throw InfeasibleStartError(os.str());
  }

  IterateState st;
  st.k = 0;
  st.x = x0;
  st.xi = spec.psi->xi(x0);
  st.anchor = Anchor::build(spec, x0, st.xi);
  check_curvature_cap(*st.anchor, cfg);

  if (cfg.mu_00) {
    st.mu_next0 = std::clamp(*cfg.mu_00, cfg.mu_min, cfg.mu_max);
  } else {
    const double lf = estimate_lipschitz(*spec.f, x0, cfg.lip_probe, cfg.probe_seed);
    st.mu_next0 = std::clamp(lf, cfg.mu_min, cfg.mu_max);
  }
  const auto m = static_cast<Eigen::Index>(spec.m);
  if (cfg.L_00) {
    st.L_next0 = Vector::Constant(m, std::clamp(*cfg.L_00, cfg.L_min, cfg.L_max));
  } else {
    const Vector lg = estimate_constraint_lipschitz(*spec.g, x0, cfg.lip_probe, cfg.probe_seed);
    st.L_next0 = clip(cfg.L_00_scale * lg, cfg.L_min, cfg.L_max);
  }
  st.mu_k = st.mu_next0;
  st.L_k = st.L_next0;
  st.lambda_k = Vector::Zero(m);
  st.v_k = spec.phi->subgradient(x0);
  st.F_val = st.anchor->objective();
  return st;
}

InnerResult inner_loop(const IterateState& state, const ProblemSpec& spec, const IMBAConfig& cfg) {
  const Anchor& a = *state.anchor;
  InnerResult res;
  double mu = state.mu_next0;
  Vector L = state.L_next0;
  res.mu0 = mu;
  res.L0 = L;
  std::optional<DualPoint> warm = cfg.warm_start ? state.warm : std::nullopt;
  std::vector<Vector> trials;

  for (int j = 0;; ++j) {
    const ModelParams params(state.anchor, mu, L);
    DualReport rep = solve_dual(params, *spec.phi, cfg.pgls, cfg.inexact(), warm);
    res.pgls_iters.push_back(rep.pgls_iters);
    res.certified.push_back(rep.exit == DualExit::certified ? 1 : 0);
    res.w_final = rep.w_final;
    if (cfg.warm_start) warm = rep.w_final;

    if (rep.exit == DualExit::certified) {
      const Certificate& c = rep.certificate;
      const Vector d = c.y - a.xk;
      const double dd = d.squaredNorm();
      if (dd == 0.0) {
        res.accepted = c;
        res.mu_used = mu;
        res.L_used = L;
        res.j_count = j;
        res.stationary = true;
        return res;
      }
      trials.push_back(c.y);
      if (max_violation(spec.g->value(c.y)) > 0.0) {
        L *= cfg.tau;
      } else if (eval_objective(spec, c.y) <= a.objective() - 0.5 * cfg.alpha * dd) {
        res.accepted = c;
        res.mu_used = mu;
        res.L_used = L;
        res.j_count = j;
        return res;
      } else {
        mu *= cfg.tau;
      }
    } else {
      const Vector& y = rep.certificate.y;
      if (y.size() == a.xk.size() && (y - a.xk).norm() <= cfg.eps) {
        // Raising mu only shrinks the step further, so any accepted step would
        // end the run on the step tolerance anyway.
        res.precision_floor = true;
        res.mu_used = mu;
        res.L_used = L;
        res.j_count = j;
        return res;
      }
      mu *= cfg.tau;
      ++res.uncertified_steps;
    }

    const int steps = j + 1;
    // The step bound assumes every trial was certified; stall escalations only
    // count against the hard cap.
    const int bounded_steps = steps - res.uncertified_steps;
    if (steps >= cfg.inner_hard_cap) {
      throw InnerLoopError("inner loop exceeded the hard step cap");
    }
    if (bounded_steps >= cfg.inner_check_after) {
      // Measured local Lipschitz constants from the trial points and a probe.
      double lf = estimate_lipschitz(*spec.f, a.xk, cfg.lip_probe, cfg.probe_seed + 17);
      Vector lg = a.m() ? estimate_constraint_lipschitz(*spec.g, a.xk, cfg.lip_probe, cfg.probe_seed + 17)
                        : Vector(0);
      for (const Vector& y : trials) {
        const double dn = (y - a.xk).norm();
        lf = std::max(lf, (spec.f->gradient(y) - a.gradf).norm() / dn);
        if (a.m()) lg = lg.cwiseMax((spec.g->jacobian(y) - a.Jk).rowwise().norm() / dn);
      }
      const double bound = inner_step_bound(cfg.lip_safety * lf, cfg.lip_safety * lg, res.mu0, res.L0, cfg.alpha,
                                            cfg.beta_R, cfg.tau);
      if (bounded_steps > std::floor(bound) + 1.0) {
        std::ostringstream os;
        os << "inner loop took " << bounded_steps << " certified steps, above the bound " << bound
           << " from measured Lipschitz constants";
        throw InnerLoopError(os.str());
      }
    }
  }
}

IterateState outer_step(const IterateState& state, const ProblemSpec& spec, const InnerResult& inner,
                        const IMBAConfig& cfg) {
  const Anchor& a = *state.anchor;
  const Vector& y = inner.accepted.y;
  IterateState next;
  next.k = state.k + 1;
  next.x = y;
  next.xi = spec.psi->xi(y);
  next.anchor = Anchor::build(spec, y, next.xi);
  if (next.anchor->A != a.A) check_curvature_cap(*next.anchor, cfg);
  next.mu_k = inner.mu_used;
  next.L_k = inner.L_used;
  next.lambda_k = inner.accepted.lambda;
  next.v_k = inner.accepted.v;
  next.F_val = next.anchor->objective();

  const Vector dx = y - a.xk;
  next.mu_next0 = bb_init_mu(dx, next.anchor->gradf - a.gradf, {cfg.mu_min, cfg.mu_max});
  next.L_next0 = bb_init_L(dx, next.anchor->Jk - a.Jk, {cfg.L_min, cfg.L_max});
  next.warm = inner.w_final;
  return next;
}

ChiTerms chi_terms(const ProblemSpec& spec, const Vector& x, const Vector& xi, const Vector& lambda,
                   double fallback_step) {
  require_size(x, static_cast<std::ptrdiff_t>(spec.n), "chi_measure(x)");
  require_size(xi, static_cast<std::ptrdiff_t>(spec.n), "chi_measure(xi)");
  require_size(lambda, static_cast<std::ptrdiff_t>(spec.m), "chi_measure(lambda)");
  if ((lambda.array() < 0.0).any()) throw std::invalid_argument("chi_measure: lambda must be >= 0");
  return chi_from(spec, x, spec.f->gradient(x), spec.g->value(x), spec.g->jacobian(x), xi, lambda, fallback_step);
}

double chi_measure(const ProblemSpec& spec, const Vector& x, const Vector& xi, const Vector& lambda,
                   double fallback_step) {
  return chi_terms(spec, x, xi, lambda, fallback_step).value();
}

SolveReport run(const ProblemSpec& spec, const Vector& x0, const IMBAConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  IterateState state = initial_state(spec, x0, cfg);
  SolveReport rep;
  rep.F_trace.push_back(state.F_val);
  rep.gmax_trace.push_back(max_violation(state.anchor->gk));
  if (cfg.record_iterates) rep.x_trace.push_back(state.x);
  double last_step = 0.0;

  for (;;) {
    if (state.k >= cfg.k_max) {
      rep.exit = SolveExit::iter_cap;
      break;
    }
    InnerResult inner = inner_loop(state, spec, cfg);
    rep.inner_steps_per_k.push_back(inner.j_count);
    rep.pgls_iters_per_k.push_back(*std::max_element(inner.pgls_iters.begin(), inner.pgls_iters.end()));
    rep.subproblem_pgls.insert(rep.subproblem_pgls.end(), inner.pgls_iters.begin(), inner.pgls_iters.end());
    rep.subproblem_certified.insert(rep.subproblem_certified.end(), inner.certified.begin(), inner.certified.end());
    rep.mu0_per_k.push_back(inner.mu0);
    rep.L0_per_k.push_back(inner.L0);
    rep.mu_trace.push_back(inner.mu_used);
    rep.Lmax_trace.push_back(inner.L_used.size() ? inner.L_used.maxCoeff() : 0.0);

    if (inner.precision_floor) {
      rep.precision_floor = true;
      rep.exit = SolveExit::step_tol;
      last_step = 0.0;
      break;
    }
    if (inner.stationary) {
      state.lambda_k = inner.accepted.lambda;
      state.v_k = inner.accepted.v;
      state.mu_k = inner.mu_used;
      state.L_k = inner.L_used;
      rep.exit = SolveExit::stationary_fixed_point;
      last_step = 0.0;
      break;
    }

    IterateState next = outer_step(state, spec, inner, cfg);
    const double step = (next.x - state.x).norm();
    const Anchor& na = *next.anchor;
    const ChiTerms chi = chi_from(spec, na.xk, na.gradf, na.gk, na.Jk, state.xi, next.lambda_k, step);
    const double compl_v = next.lambda_k.size() ? pos(-next.lambda_k.dot(na.gk)) : 0.0;

    rep.step_norms.push_back(step);
    rep.F_trace.push_back(next.F_val);
    rep.gmax_trace.push_back(max_violation(na.gk));
    rep.compl_trace.push_back(compl_v);
    rep.chi_trace.push_back(chi.value());
    if (cfg.record_iterates) rep.x_trace.push_back(next.x);
    state = std::move(next);
    last_step = step;

    if (step <= cfg.eps) {
      rep.exit = SolveExit::step_tol;
      break;
    }
    if (compl_v <= cfg.eps1 && state.k >= cfg.k_min_compl) {
      rep.exit = SolveExit::compl_tol;
      break;
    }
  }

  const Anchor& fa = *state.anchor;
  rep.iterations = state.k;
  rep.final_x = state.x;
  rep.final_lambda = state.lambda_k;
  rep.final_xi = state.xi;
  rep.final_v = state.v_k;
  rep.final_F = state.F_val;
  rep.final_compl = state.lambda_k.size() ? pos(-state.lambda_k.dot(fa.gk)) : 0.0;
  rep.final_chi = chi_from(spec, fa.xk, fa.gradf, fa.gk, fa.Jk, state.xi, state.lambda_k, last_step).value();
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

}  // namespace dcmba
