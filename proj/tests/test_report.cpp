#include "helpers.hpp"

#include "dcmba/encoding.hpp"
#include "dcmba/report.hpp"

#include <doctest.h>

using namespace testutil;

TEST_CASE("configs round-trip through JSON") {
  IMBAConfig c;
  c.eps = 1e-10;
  c.k_max = 77;
  c.mu_00 = 3.5;
  c.pgls.block_metric = false;
  c.pgls.tau0 = 2.0;
  const IMBAConfig back = imba_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.mu_00 == 3.5);
  CHECK_FALSE(back.L_00.has_value());

  DcaConfig d;
  d.sub_cfg.eps = 1e-9;
  CHECK(to_json(dca_config_from_json(to_json(d))) == to_json(d));
}

TEST_CASE("config parsing keeps defaults and rejects unknown or invalid keys") {
  const IMBAConfig c = imba_config_from_json(json::parse(R"({"eps": 1e-6})"));
  CHECK(c.eps == 1e-6);
  CHECK(c.beta_R == 1e10);
  CHECK_THROWS(imba_config_from_json(json::parse(R"({"epsilon": 1e-6})")));
  CHECK_THROWS(imba_config_from_json(json::parse(R"({"tau": 0.5})")));
  CHECK_THROWS(pgls_config_from_json(json::parse(R"({"rho": 1.0})")));
}

TEST_CASE("exit names round-trip") {
  for (SolveExit e : {SolveExit::step_tol, SolveExit::compl_tol, SolveExit::iter_cap, SolveExit::stationary_fixed_point}) {
    CHECK(solve_exit_from_string(to_string(e)) == e);
  }
  CHECK_THROWS(solve_exit_from_string("done"));
}

TEST_CASE("report JSON and CSV") {
  const QCQPInstance inst = small_qcqp(5);
  const ProblemSpec spec = make_problem(inst);
  IMBAConfig cfg;
  cfg.k_min_compl = 10;
  const SolveReport rep = run(spec, inst.x0, cfg);
  const json j = report_to_json(rep, to_json(cfg), instance_checksum(Instance(inst)), true);
  CHECK(j["format"] == "dcreport");
  CHECK(j["summary"]["iter"] == rep.iterations);
  CHECK(j["summary"]["Fval"].get<double>() == rep.final_F);
  CHECK(j["summary"]["exit"] == to_string(rep.exit));
  CHECK(j["summary"]["F_trace_checksum"] == f_trace_checksum(rep));
  CHECK(j["F_trace"].size() == rep.F_trace.size());
  CHECK(j.contains("trace"));
  CHECK_FALSE(report_to_json(rep, to_json(cfg), "", false).contains("trace"));
  CHECK(f_trace_checksum(rep) == hex64(fnv1a64_doubles(rep.F_trace)));

  CHECK(std::string(kReportCsvHeader) == "iter,Fval,time_s,compl");
  const std::string row = report_csv_row(rep);
  CHECK(std::count(row.begin(), row.end(), ',') == 3);
  CHECK(row.rfind(std::to_string(rep.iterations) + ",", 0) == 0);
}
