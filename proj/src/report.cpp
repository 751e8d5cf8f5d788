#include "dcmba/report.hpp"

#include "dcmba/encoding.hpp"

#include <cstdio>
#include <set>

namespace dcmba {

namespace {

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) throw std::invalid_argument(std::string(what) + ": unknown key '" + k + "'");
  }
}

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const PGlsConfig& c) {
  json j{{"tau_min", c.tau_min},       {"tau_max", c.tau_max},       {"rho", c.rho},
         {"delta", c.delta},           {"l_max", c.l_max},           {"max_backtracks", c.max_backtracks},
         {"tau0_scale", c.tau0_scale}, {"power_iters", c.power_iters}, {"block_metric", c.block_metric}};
  j["tau0"] = c.tau0 ? json(*c.tau0) : json(nullptr);
  return j;
}

PGlsConfig pgls_config_from_json(const json& j) {
  reject_unknown(j, {"tau_min", "tau_max", "rho", "delta", "l_max", "max_backtracks", "tau0_scale", "power_iters",
                     "block_metric", "tau0"},
                 "pgls config");
  PGlsConfig c;
  get_opt(j, "tau_min", c.tau_min);
  get_opt(j, "tau_max", c.tau_max);
  get_opt(j, "rho", c.rho);
  get_opt(j, "delta", c.delta);
  get_opt(j, "l_max", c.l_max);
  get_opt(j, "max_backtracks", c.max_backtracks);
  get_opt(j, "tau0_scale", c.tau0_scale);
  get_opt(j, "power_iters", c.power_iters);
  get_opt(j, "block_metric", c.block_metric);
  if (j.contains("tau0") && !j["tau0"].is_null()) c.tau0 = j["tau0"].get<double>();
  c.validate();
  return c;
}

json to_json(const IMBAConfig& c) {
  json j{{"mu_min", c.mu_min},
         {"mu_max", c.mu_max},
         {"L_min", c.L_min},
         {"L_max", c.L_max},
         {"M", c.M},
         {"beta_R", c.beta_R},
         {"beta_F", c.beta_F},
         {"alpha", c.alpha},
         {"tau", c.tau},
         {"L_00_scale", c.L_00_scale},
         {"lip_probe", c.lip_probe},
         {"probe_seed", c.probe_seed},
         {"eps", c.eps},
         {"eps1", c.eps1},
         {"k_max", c.k_max},
         {"k_min_compl", c.k_min_compl},
         {"pgls", to_json(c.pgls)},
         {"warm_start", c.warm_start},
         {"inner_check_after", c.inner_check_after},
         {"lip_safety", c.lip_safety},
         {"inner_hard_cap", c.inner_hard_cap},
         {"record_iterates", c.record_iterates}};
  j["mu_00"] = c.mu_00 ? json(*c.mu_00) : json(nullptr);
  j["L_00"] = c.L_00 ? json(*c.L_00) : json(nullptr);
  return j;
}

IMBAConfig imba_config_from_json(const json& j) {
  reject_unknown(j, {"mu_min", "mu_max", "L_min", "L_max", "M", "beta_R", "beta_F", "alpha", "tau", "mu_00",
                     "L_00_scale", "L_00", "lip_probe", "probe_seed", "eps", "eps1", "k_max", "k_min_compl", "pgls",
                     "warm_start", "inner_check_after", "lip_safety", "inner_hard_cap", "record_iterates"},
                 "imba config");
  IMBAConfig c;
  get_opt(j, "mu_min", c.mu_min);
  get_opt(j, "mu_max", c.mu_max);
  get_opt(j, "L_min", c.L_min);
  get_opt(j, "L_max", c.L_max);
  get_opt(j, "M", c.M);
  get_opt(j, "beta_R", c.beta_R);
  get_opt(j, "beta_F", c.beta_F);
  get_opt(j, "alpha", c.alpha);
  get_opt(j, "tau", c.tau);
  get_opt(j, "L_00_scale", c.L_00_scale);
  get_opt(j, "lip_probe", c.lip_probe);
  get_opt(j, "probe_seed", c.probe_seed);
  get_opt(j, "eps", c.eps);
  get_opt(j, "eps1", c.eps1);
  get_opt(j, "k_max", c.k_max);
  get_opt(j, "k_min_compl", c.k_min_compl);
  get_opt(j, "warm_start", c.warm_start);
  get_opt(j, "inner_check_after", c.inner_check_after);
  get_opt(j, "lip_safety", c.lip_safety);
  get_opt(j, "inner_hard_cap", c.inner_hard_cap);
  get_opt(j, "record_iterates", c.record_iterates);
  if (j.contains("mu_00") && !j["mu_00"].is_null()) c.mu_00 = j["mu_00"].get<double>();
  if (j.contains("L_00") && !j["L_00"].is_null()) c.L_00 = j["L_00"].get<double>();
  if (j.contains("pgls")) c.pgls = pgls_config_from_json(j["pgls"]);
  c.validate();
  return c;
}

json to_json(const DcaConfig& c) { return {{"eps", c.eps}, {"k_max", c.k_max}, {"sub_cfg", to_json(c.sub_cfg)}}; }

DcaConfig dca_config_from_json(const json& j) {
  reject_unknown(j, {"eps", "k_max", "sub_cfg"}, "dca config");
  DcaConfig c;
  get_opt(j, "eps", c.eps);
  get_opt(j, "k_max", c.k_max);
  if (j.contains("sub_cfg")) c.sub_cfg = imba_config_from_json(j["sub_cfg"]);
  c.validate();
  return c;
}

SolveExit solve_exit_from_string(const std::string& s) {
  for (SolveExit e : {SolveExit::step_tol, SolveExit::compl_tol, SolveExit::iter_cap, SolveExit::stationary_fixed_point}) {
    if (to_string(e) == s) return e;
  }
  throw std::invalid_argument("unknown exit '" + s + "'");
}

std::string f_trace_checksum(const SolveReport& rep) { return hex64(fnv1a64_doubles(rep.F_trace)); }

json report_to_json(const SolveReport& rep, const json& run_config, const std::string& instance_checksum,
                    bool trace) {
  json j;
  j["format"] = "dcreport";
  j["version"] = 1;
  j["config"] = run_config;
  j["instance_checksum"] = instance_checksum;
  j["summary"] = {{"iter", rep.iterations},
                  {"Fval", rep.final_F},
                  {"time_s", rep.wall_time},
                  {"compl", rep.final_compl},
                  {"chi", rep.final_chi},
                  {"exit", to_string(rep.exit)},
                  {"precision_floor", rep.precision_floor},
                  {"F_trace_checksum", f_trace_checksum(rep)}};
  j["final"] = {{"x", vec(rep.final_x)}, {"lambda", vec(rep.final_lambda)}, {"xi", vec(rep.final_xi)}};
  j["F_trace"] = rep.F_trace;
  if (trace) {
    json t;
    t["step_norms"] = rep.step_norms;
    t["compl"] = rep.compl_trace;
    t["chi"] = rep.chi_trace;
    t["gmax"] = rep.gmax_trace;
    t["inner_steps_per_k"] = rep.inner_steps_per_k;
    t["pgls_iters_per_k"] = rep.pgls_iters_per_k;
    t["mu"] = rep.mu_trace;
    t["L_max"] = rep.Lmax_trace;
    t["mu0"] = rep.mu0_per_k;
    t["subproblem_pgls"] = rep.subproblem_pgls;
    std::vector<int> cert(rep.subproblem_certified.begin(), rep.subproblem_certified.end());
    t["subproblem_certified"] = cert;
    j["trace"] = std::move(t);
  }
  return j;
}

std::string report_csv_row(const SolveReport& rep) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d,%.10e,%.4f,%.3e", rep.iterations, rep.final_F, rep.wall_time, rep.final_compl);
  return buf;
}

}  // namespace dcmba
