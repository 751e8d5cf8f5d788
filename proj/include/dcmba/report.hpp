#pragma once

// JSON and CSV views of configurations and solve reports.

#include "dcmba/baseline.hpp"
#include "dcmba/driver.hpp"

#include <json.hpp>

#include <string>

namespace dcmba {

using json = nlohmann::json;

json to_json(const PGlsConfig& c);
json to_json(const IMBAConfig& c);
json to_json(const DcaConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
PGlsConfig pgls_config_from_json(const json& j);
IMBAConfig imba_config_from_json(const json& j);
DcaConfig dca_config_from_json(const json& j);

SolveExit solve_exit_from_string(const std::string& s);

/// FNV-1a 64 over the little-endian bytes of F_trace, as 16 hex digits.
std::string f_trace_checksum(const SolveReport& rep);

/// Summary, final point and F_trace; with `trace` also every per-iteration series.
json report_to_json(const SolveReport& rep, const json& run_config, const std::string& instance_checksum,
                    bool trace);

/// One row per solve; the bench table prefixes its own key columns.
inline const char* kReportCsvHeader = "iter,Fval,time_s,compl";
std::string report_csv_row(const SolveReport& rep);

}  // namespace dcmba
