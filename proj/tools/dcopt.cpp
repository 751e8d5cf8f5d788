// dcopt: generate instances, solve them with iMBA or DCA, run benchmark
// sweeps and the oracle self-check.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 infeasible start,
// 3 iteration cap, 4 verification failure.

#include "dcmba/baseline.hpp"
#include "dcmba/driver.hpp"
#include "dcmba/instances.hpp"
#include "dcmba/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace dcmba;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kError = 1, kInfeasibleStart = 2, kIterCap = 3, kVerifyFailed = 4 };

constexpr const char* kBenchSchema = "#schema=dcopt-bench/1";
constexpr const char* kBenchHeader = "algo,n,m,omega0,p_scale,seed,iter,Fval,time_s,compl,exit,checksum";

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return json::parse(in);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string family;
  int n = 30;
  int m = 10;
  double omega0 = 10.0;
  double p_scale = 0.0;
  double phi_weight = 0.01;
  std::optional<double> psi_weight;
  double cond_exponent = 4.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  Instance inst;
  std::string stem;
  if (a.family == "qcqp") {
    QCQPParams p;
    p.n = a.n;
    p.m = a.m;
    p.omega0 = a.omega0;
    p.P_scale = a.p_scale;
    p.phi_weight = a.phi_weight;
    // the DC family pairs P > 0 with psi = 0.01 |.|
    p.psi_weight = a.psi_weight.value_or(a.p_scale > 0.0 ? 0.01 : 0.0);
    p.cond_exponent = a.cond_exponent;
    p.seed = a.seed;
    inst = gen_qcqp(p);
    stem = fmt("qcqp_n%d_m%d_s%llu", a.n, a.m, static_cast<unsigned long long>(a.seed));
  } else {
    StudentTParams p;
    p.n = a.n;
    p.m = a.m;
    p.P_scale = a.p_scale;
    p.phi_weight = a.phi_weight;
    p.psi_weight = a.psi_weight.value_or(0.01);
    p.cond_exponent = a.cond_exponent;
    p.seed = a.seed;
    inst = gen_student_t(p);
    stem = fmt("student_t_n%d_m%d_s%llu", a.n, a.m, static_cast<unsigned long long>(a.seed));
  }
  const fs::path out = a.out.empty() ? fs::path(stem + ".dcinst.json") : fs::path(a.out);
  save_instance(inst, out);
  std::printf("%s %s\n", instance_checksum(inst).c_str(), out.string().c_str());
  return kOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string instance;
  std::string algo = "imba";
  std::string config;
  std::optional<double> eps;
  std::optional<double> eps1;
  std::optional<int> kmax;
  bool trace = false;
  bool seed_check = false;
  std::string out;
  std::string csv;
};

struct RunConfig {
  std::string algo = "imba";
  IMBAConfig imba;
  DcaConfig dca;

  json to_json() const {
    return {{"algo", algo}, {"solver", algo == "dca" ? dcmba::to_json(dca) : dcmba::to_json(imba)}};
  }
};

// Accepts a bare solver config, a {"algo", "solver"} run config, or a report
// (whose embedded run config is used).
RunConfig load_run_config(const std::string& path, const std::string& algo) {
  RunConfig rc;
  rc.algo = algo;
  if (path.empty()) return rc;
  json j = read_json(path);
  if (j.value("format", "") == "dcreport") j = j.at("config");
  json solver = j;
  if (j.contains("solver")) {
    rc.algo = j.value("algo", algo);
    solver = j.at("solver");
  }
  if (rc.algo == "dca")
    rc.dca = dca_config_from_json(solver);
  else if (rc.algo == "imba")
    rc.imba = imba_config_from_json(solver);
  else
    throw std::invalid_argument("unknown algo '" + rc.algo + "'");
  return rc;
}

SolveReport run_config(const Instance& inst, const RunConfig& rc) {
  if (rc.algo == "dca") {
    const auto* q = std::get_if<QCQPInstance>(&inst);
    if (!q) throw std::invalid_argument("--algo dca supports qcqp instances only");
    return dca_run(*q, q->x0, rc.dca);
  }
  return run(make_problem(inst), instance_x0(inst), rc.imba);
}

Instance regenerate(const Instance& inst) {
  if (const auto* q = std::get_if<QCQPInstance>(&inst)) {
    QCQPParams p;
    p.n = q->n;
    p.m = q->m;
    p.omega0 = q->omega0;
    p.P_scale = q->cons.P_scale;
    p.phi_weight = q->phi_weight;
    p.psi_weight = q->psi_weight;
    p.cond_exponent = q->cond_exponent;
    p.seed = q->seed;
    return gen_qcqp(p);
  }
  const auto& s = std::get<StudentTInstance>(inst);
  StudentTParams p;
  p.n = s.n;
  p.m = s.m();
  p.P_scale = s.cons.P_scale;
  p.phi_weight = s.phi_weight;
  p.psi_weight = s.psi_weight;
  p.cond_exponent = s.cond_exponent;
  p.seed = s.seed;
  return gen_student_t(p);
}

void append_csv(const fs::path& p, const std::string& header, const std::string& row) {
  const bool fresh = !fs::exists(p) || fs::file_size(p) == 0;
  std::ofstream out(p, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  if (fresh) out << header << "\n";
  out << row << "\n";
}

int cmd_solve(const SolveArgs& a) {
  const Instance inst = load_instance(a.instance);
  RunConfig rc = load_run_config(a.config, a.algo);
  if (rc.algo == "dca") {
    if (a.eps) rc.dca.eps = *a.eps;
    if (a.eps1) rc.dca.sub_cfg.eps1 = *a.eps1;
    if (a.kmax) rc.dca.k_max = *a.kmax;
    rc.dca.validate();
  } else {
    if (a.eps) rc.imba.eps = *a.eps;
    if (a.eps1) rc.imba.eps1 = *a.eps1;
    if (a.kmax) rc.imba.k_max = *a.kmax;
    rc.imba.validate();
  }

  const std::string checksum = instance_checksum(inst);
  const SolveReport rep = run_config(inst, rc);
  const json report = report_to_json(rep, rc.to_json(), checksum, a.trace);

  fs::path out = a.out;
  if (out.empty()) {
    std::string stem = fs::path(a.instance).filename().string();
    if (auto pos = stem.find(".dcinst.json"); pos != std::string::npos) stem.erase(pos);
    out = fs::path(a.instance).parent_path() / (stem + "." + rc.algo + ".report.json");
  }
  write_text(out, report.dump(2) + "\n");
  if (a.csv.empty())
    std::printf("%s\n%s\n", kReportCsvHeader, report_csv_row(rep).c_str());
  else
    append_csv(a.csv, kReportCsvHeader, report_csv_row(rep));
  std::fprintf(stderr, "%s: exit %s after %d iterations, F = %.10e, report %s\n", rc.algo.c_str(),
               to_string(rep.exit).c_str(), rep.iterations, rep.final_F, out.string().c_str());

  if (a.seed_check) {
    // The instance must follow from its recorded seed, and a second solve from
    // the embedded config must repeat F_trace bit for bit.
    const std::string regen = instance_checksum(regenerate(inst));
    const SolveReport again = run_config(inst, load_run_config(out.string(), rc.algo));
    const bool inst_ok = regen == checksum;
    const bool trace_ok = f_trace_checksum(again) == f_trace_checksum(rep);
    std::fprintf(stderr, "seed check: instance %s (%s vs %s), F_trace %s\n", inst_ok ? "ok" : "MISMATCH",
                 regen.c_str(), checksum.c_str(), trace_ok ? "ok" : "MISMATCH");
    if (!inst_ok || !trace_ok) return kVerifyFailed;
  }
  return rep.exit == SolveExit::iter_cap ? kIterCap : kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchRow {
  std::string algo;
  int n = 0;
  int m = 0;
  double omega0 = 0.0;
  double p_scale = 0.0;
  std::uint64_t seed = 0;
};

struct BenchPlan {
  std::vector<BenchRow> rows;
  double cond_exponent = 4.0;
  double phi_weight = 0.01;
  std::optional<double> psi_weight;
  IMBAConfig imba;
  DcaConfig dca;
};

template <class T>
std::vector<T> as_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

BenchPlan plan_from_json(const json& j) {
  static const std::vector<std::string> known = {"n",          "m",          "omega0",        "p_scale", "seeds",
                                                 "algos",      "phi_weight", "psi_weight",    "imba",    "dca",
                                                 "cond_exponent"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw std::invalid_argument("unknown bench key '" + k + "'");
  BenchPlan plan;
  plan.cond_exponent = j.value("cond_exponent", 4.0);
  plan.phi_weight = j.value("phi_weight", 0.01);
  if (j.contains("psi_weight")) plan.psi_weight = j.at("psi_weight").get<double>();
  if (j.contains("imba")) plan.imba = imba_config_from_json(j.at("imba"));
  if (j.contains("dca")) plan.dca = dca_config_from_json(j.at("dca"));

  std::vector<std::uint64_t> seeds;
  const json& s = j.at("seeds");
  if (s.is_number_integer()) {
    for (std::uint64_t i = 1; i <= s.get<std::uint64_t>(); ++i) seeds.push_back(i);
  } else {
    seeds = as_list<std::uint64_t>(s);
  }
  const auto algos = j.contains("algos") ? as_list<std::string>(j.at("algos")) : std::vector<std::string>{"imba", "dca"};
  for (const auto& a : algos)
    if (a != "imba" && a != "dca") throw std::invalid_argument("unknown algo '" + a + "'");
  for (const auto& algo : algos)
    for (int n : as_list<int>(j.at("n")))
      for (int m : as_list<int>(j.at("m")))
        for (double om : as_list<double>(j.at("omega0")))
          for (double P : as_list<double>(j.value("p_scale", json(0.0))))
            for (std::uint64_t seed : seeds) plan.rows.push_back({algo, n, m, om, P, seed});
  return plan;
}

json preset(const std::string& name) {
  json j = {{"n", {30, 60}}, {"m", {10, 30}}, {"omega0", {10.0}}, {"seeds", 3}, {"algos", {"imba", "dca"}}};
  if (name == "desk") {
    j["p_scale"] = 0.0;
  } else if (name == "desk-dc") {
    // P sits at the geometric midpoint of the constraint spectrum [1, 1e4]
    j["p_scale"] = 1e2;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "' (desk, desk-dc)");
  }
  return j;
}

std::string csv_num(double v) { return fmt("%.10e", v); }

std::string bench_one(const BenchRow& r, const BenchPlan& plan) {
  std::string head = fmt("%s,%d,%d,%g,%g,%llu,", r.algo.c_str(), r.n, r.m, r.omega0, r.p_scale,
                         static_cast<unsigned long long>(r.seed));
  std::string checksum;
  try {
    QCQPParams p;
    p.n = r.n;
    p.m = r.m;
    p.omega0 = r.omega0;
    p.P_scale = r.p_scale;
    p.phi_weight = plan.phi_weight;
    p.psi_weight = plan.psi_weight.value_or(r.p_scale > 0.0 ? 0.01 : 0.0);
    p.cond_exponent = plan.cond_exponent;
    p.seed = r.seed;
    const QCQPInstance inst = gen_qcqp(p);
    checksum = instance_checksum(Instance(inst));
    const SolveReport rep =
        r.algo == "dca" ? dca_run(inst, inst.x0, plan.dca) : run(make_problem(inst), inst.x0, plan.imba);
    return head + std::to_string(rep.iterations) + "," + csv_num(rep.final_F) + "," + fmt("%.3f", rep.wall_time) +
           "," + csv_num(rep.final_compl) + "," + to_string(rep.exit) + "," + checksum;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "row %s failed: %s\n", head.c_str(), e.what());
    return head + ",,,,error," + checksum;
  }
}

unsigned bench_threads(std::optional<unsigned> requested) {
  unsigned t = requested.value_or(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("DCOPT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) t = std::min<unsigned>(t, static_cast<unsigned>(cap));
  }
  return std::max(1u, t);
}

int cmd_bench(const std::string& config, const std::string& preset_name, const std::string& out,
              std::optional<unsigned> threads) {
  const BenchPlan plan = plan_from_json(config.empty() ? preset(preset_name) : read_json(config));
  plan.imba.validate();
  plan.dca.validate();

  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << kBenchSchema << "\n" << kBenchHeader << "\n";

  // Workers take rows in order; finished rows are written as soon as every
  // earlier row is out, so the file order never depends on scheduling.
  const std::size_t N = plan.rows.size();
  std::vector<std::optional<std::string>> done(N);
  std::size_t next_out = 0;
  std::atomic<std::size_t> next_row{0};
  std::mutex mu;
  int errors = 0;
  auto worker = [&] {
    for (std::size_t i; (i = next_row++) < N;) {
      std::string line = bench_one(plan.rows[i], plan);
      std::lock_guard lock(mu);
      if (line.find(",error,") != std::string::npos) ++errors;
      done[i] = std::move(line);
      while (next_out < N && done[next_out]) {
        os << *done[next_out] << "\n";
        os.flush();
        done[next_out++].reset();
      }
    }
  };
  const unsigned T = std::min<unsigned>(bench_threads(threads), static_cast<unsigned>(std::max<std::size_t>(N, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < T; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  std::fprintf(stderr, "bench: %zu rows on %u threads, %d failed\n", N, T, errors);
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

double rel_err(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

Vector central_diff(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

Check check_primal_gradients() {
  double worst = 0.0;
  SplitMix64 rng(11);
  auto probe = [&](const ProblemSpec& spec, const Vector& x0) {
    for (int t = 0; t < 5; ++t) {
      Vector x = x0;
      for (auto& v : x) v += rng.uniform(-0.1, 0.1);
      worst = std::max(worst, rel_err(spec.f->gradient(x), central_diff([&](const Vector& z) { return spec.f->value(z); }, x, 1e-6)));
      const Matrix J = spec.g->jacobian(x);
      for (Eigen::Index i = 0; i < J.rows(); ++i) {
        const Vector fd = central_diff([&](const Vector& z) { return spec.g->value(z)[i]; }, x, 1e-5);
        worst = std::max(worst, rel_err(J.row(i).transpose(), fd));
      }
    }
  };
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const QCQPInstance c = gen_qcqp(QCQPParams::convex_l1(12, 4, 10.0, seed));
    probe(make_problem(c), c.x0);
    const QCQPInstance d = gen_qcqp(QCQPParams::dc_l1l2(12, 4, 10.0, seed, 10.0));
    probe(make_problem(d), d.x0);
  }
  const StudentTInstance s = gen_student_t({});
  probe(make_problem(s), s.x0);
  return {"primal gradients", worst <= 1e-5, fmt("max FD rel err %.2e", worst)};
}

// Random model at x0 of a convex instance, with multipliers and curvature drawn from `rng`.
struct DualProbe {
  QCQPInstance inst;
  ProblemSpec spec;
  ModelParams params;
};

DualProbe dual_probe(std::uint64_t seed, int n, int m, SplitMix64& rng) {
  QCQPInstance inst = gen_qcqp(QCQPParams::convex_l1(n, m, 10.0, seed));
  ProblemSpec spec = make_problem(inst);
  Vector L(m);
  for (auto& v : L) v = rng.uniform(0.5, 5.0);
  ModelParams p(Anchor::build(spec, inst.x0, spec.psi->xi(inst.x0)), rng.uniform(0.5, 5.0), L);
  return {std::move(inst), std::move(spec), std::move(p)};
}

DualPoint random_dual(const ModelParams& p, double c, SplitMix64& rng) {
  DualPoint w = DualPoint::zeros(p.m(), p.n(), p.curv().p());
  for (auto& v : w.lambda) v = rng.uniform(0.0, 2.0);
  for (auto& v : w.eta) v = rng.uniform(-c, c);
  for (auto& v : w.zeta) v = rng.uniform(-1.0, 1.0);
  return w;
}

Check check_dual_gradient(int seeds) {
  double worst_fd = 0.0, worst_id = 0.0;
  for (int seed = 1; seed <= seeds; ++seed) {
    SplitMix64 rng(1000 + seed);
    const DualProbe d = dual_probe(seed, 30, 10, rng);
    for (int t = 0; t < 10; ++t) {
      const DualPoint w = random_dual(d.params, d.inst.phi_weight, rng);
      const DualGradient g = grad_Theta(d.params, w);
      const double h = 1e-3;
      auto fd_block = [&](Vector DualPoint::*member, const Vector& grad) {
        Vector fd(grad.size());
        for (Eigen::Index i = 0; i < fd.size(); ++i) {
          DualPoint a = w, b = w;
          (a.*member)[i] += h;
          (b.*member)[i] -= h;
          fd[i] = (eval_Theta(d.params, a) - eval_Theta(d.params, b)) / (2.0 * h);
        }
        return rel_err(grad, fd);
      };
      worst_fd = std::max({worst_fd, fd_block(&DualPoint::lambda, g.lambda), fd_block(&DualPoint::eta, g.eta),
                           fd_block(&DualPoint::zeta, g.zeta)});
      // grad_lambda Theta = -G at the recovered primal point
      const Vector G = eval_G(d.params, recover_primal(d.params, w));
      worst_id = std::max(worst_id, (g.lambda + G).lpNorm<Eigen::Infinity>() / std::max(1.0, G.norm()));
    }
  }
  return {"dual gradient", worst_fd <= 1e-6 && worst_id <= 1e-10,
          fmt("max FD rel err %.2e, max |grad_lambda + G| %.2e", worst_fd, worst_id)};
}

Check check_weak_duality(int seeds) {
  int viol = 0, samples = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    SplitMix64 rng(2000 + seed);
    const DualProbe d = dual_probe(seed, 30, 10, rng);
    for (int here = 0; here < 100;) {
      const DualPoint w = random_dual(d.params, d.inst.phi_weight, rng);
      Vector x = d.params.xk();
      const double r = rng.uniform(0.0, 0.1);
      for (auto& v : x) v += rng.uniform(-r, r);
      if (eval_G(d.params, x).maxCoeff() > 0.0) continue;
      ++here;
      ++samples;
      if (-eval_Xi(d.params, *d.spec.phi, w) > eval_Fkj(d.params, *d.spec.phi, x)) ++viol;
    }
  }
  return {"weak duality", viol == 0, fmt("%d of %d samples violate -Xi <= F_kj", viol, samples)};
}

Check check_toys(int count) {
  int fails = 0;
  double worst = 0.0;
  for (int t = 0; t < count; ++t) {
    const QCQPInstance inst = gen_qcqp(QCQPParams::convex_l1(2, 1 + t % 2, 10.0, 100 + t, 2.0));
    const ProblemSpec spec = make_problem(inst);
    IMBAConfig cfg;
    cfg.eps = 1e-8;
    const SolveReport rep = run(spec, inst.x0, cfg);
    const OracleResult ref = brute_force_min(spec, qcqp_feasible_box(inst));
    const double err = std::abs(rep.final_F - ref.F_star);
    worst = std::max(worst, err);
    if (err > 1e-3 || !kkt_verify(spec, rep.final_x, rep.final_xi, rep.final_lambda, 1e-2)) ++fails;
  }
  return {"toy KKT and grid", fails == 0, fmt("%d of %d toys failed, max |F - F_grid| %.2e", fails, count, worst)};
}

Check check_dca_agreement(int seeds) {
  double worst = 0.0;
  for (int seed = 1; seed <= seeds; ++seed) {
    const QCQPInstance inst = gen_qcqp(QCQPParams::convex_l1(10, 4, 10.0, seed));
    // iMBA at the tolerance DCA uses for its sub-solves; at the default 1e-5
    // its step stop can end a few 1e-4 short on some instances.
    const SolveReport a = run(make_problem(inst), inst.x0, dca_default_sub_config());
    const SolveReport d = dca_run(inst, inst.x0, {});
    worst = std::max(worst, std::abs(a.final_F - d.final_F) / std::max(1.0, std::abs(a.final_F)));
  }
  return {"DCA agreement", worst <= 1e-4, fmt("max relative |F_imba - F_dca| %.2e", worst)};
}

Check check_smoke() {
  const QCQPInstance inst = gen_qcqp(QCQPParams::convex_l1(100, 100, 10.0, 1, 10.0));
  const ProblemSpec spec = make_problem(inst);
  const SolveReport rep = run(spec, inst.x0, {});
  bool ok = rep.exit != SolveExit::iter_cap && std::isfinite(rep.final_F);
  for (double g : rep.gmax_trace) ok = ok && g <= 0.0;
  for (std::size_t k = 1; k < rep.F_trace.size(); ++k) ok = ok && rep.F_trace[k] <= rep.F_trace[k - 1];
  return {"cond_exponent 10 smoke", ok,
          fmt("n = m = 100: exit %s after %d iterations, F = %.6e", to_string(rep.exit).c_str(), rep.iterations,
              rep.final_F)};
}

int cmd_verify(bool full) {
  std::vector<std::function<Check()>> plan = {
      check_primal_gradients,
      [&] { return check_dual_gradient(full ? 5 : 2); },
      [&] { return check_weak_duality(full ? 5 : 2); },
      [&] { return check_toys(full ? 10 : 4); },
      [&] { return check_dca_agreement(full ? 3 : 1); },
  };
  if (full) plan.push_back(check_smoke);

  json checks = json::array();
  bool all = true;
  for (const auto& fn : plan) {
    const auto t0 = Clock::now();
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = seconds_since(t0);
    all = all && c.pass;
    std::fprintf(stderr, "%s %s: %s [%.1f s]\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str(), c.seconds);
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"seconds", c.seconds}});
  }
  const json summary = {{"mode", full ? "full" : "quick"}, {"pass", all}, {"checks", checks}};
  std::printf("%s\n", summary.dump().c_str());
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcopt: inexact moving balls for constrained DC problems"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a seeded instance file");
  generate->add_option("family", gen.family, "qcqp or student-t")->required()->check(CLI::IsMember({"qcqp", "student-t"}));
  generate->add_option("--n", gen.n, "dimension")->check(CLI::PositiveNumber);
  generate->add_option("--m", gen.m, "number of constraints")->check(CLI::PositiveNumber);
  generate->add_option("--omega0", gen.omega0, "objective scale (qcqp)");
  generate->add_option("--p-scale", gen.p_scale, "concave constraint part P");
  generate->add_option("--phi-weight", gen.phi_weight, "weight of |.|_1");
  generate->add_option("--psi-weight", gen.psi_weight, "weight of |.| (default 0.01 if P > 0 or student-t, else 0)");
  generate->add_option("--cond-exponent", gen.cond_exponent, "constraint spectrum [1, 10^c]");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("-o,--out", gen.out, "output path (default <family>_n<n>_m<m>_s<seed>.dcinst.json)");

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "solve an instance and write a report");
  solve->add_option("instance", sol.instance, "instance file")->required()->check(CLI::ExistingFile);
  solve->add_option("--algo", sol.algo, "imba or dca")->check(CLI::IsMember({"imba", "dca"}));
  solve->add_option("--config", sol.config, "solver config, run config or earlier report (JSON)")->check(CLI::ExistingFile);
  solve->add_option("--eps", sol.eps, "step tolerance");
  solve->add_option("--eps1", sol.eps1, "complementarity tolerance");
  solve->add_option("--kmax", sol.kmax, "iteration cap");
  solve->add_flag("--trace", sol.trace, "include every per-iteration series in the report");
  solve->add_flag("--seed-independent-check", sol.seed_check,
                  "regenerate the instance from its seed and re-solve from the report's config; exit 4 on mismatch");
  solve->add_option("-o,--out", sol.out, "report path (default next to the instance)");
  solve->add_option("--csv", sol.csv, "append the iter,Fval,time_s,compl row here instead of stdout");

  std::string bench_config, bench_preset = "desk", bench_out;
  std::optional<unsigned> bench_threads_opt;
  auto* bench = app.add_subcommand("bench", "sweep generated qcqp instances with iMBA and DCA");
  auto* cfg_opt = bench->add_option("--config", bench_config, "sweep config (JSON)")->check(CLI::ExistingFile);
  bench->add_option("--preset", bench_preset, "desk (convex) or desk-dc")->excludes(cfg_opt);
  bench->add_option("-o,--out", bench_out, "CSV path (default stdout)");
  bench->add_option("--threads", bench_threads_opt, "worker threads (capped by DCOPT_THREADS)")->check(CLI::PositiveNumber);

  bool full = false;
  auto* verify = app.add_subcommand("verify", "run the oracle self-check");
  auto* quick_flag = verify->add_flag("--quick", "gradient, duality and toy checks (default)");
  verify->add_flag("--full", full, "more seeds plus the cond_exponent 10 smoke run")->excludes(quick_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*solve) return cmd_solve(sol);
    if (*bench) return cmd_bench(bench_config, bench_preset, bench_out, bench_threads_opt);
    if (*verify) return cmd_verify(full);
  } catch (const InfeasibleStartError& e) {
    std::fprintf(stderr, "infeasible start: %s\n", e.what());
    return kInfeasibleStart;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kError;
}
