#pragma once

#include "dhj/closed_form.hpp"
#include "dhj/estimates.hpp"
#include "dhj/pde_solver.hpp"
#include "dhj/shooting.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dhj::cli {

using json = nlohmann::ordered_json;

/// Exit codes shared by every subcommand.
enum ExitCode : int { Ok = 0, UsageError = 1, NumericFailure = 2, VerificationFail = 3 };

/// Throws std::invalid_argument when obj carries a key outside allowed.
void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where);

/// Solution-family schema, e.g. {"family":"traveling-wave","p":3,"a":[1.0]}.
ClosedFormSolution family_from_json(const json& spec);

json context_report(double p);

struct ProfileJobResult {
    ProfileTrajectory trajectory;
    json report;
    int exit_code = Ok;
};
/// params: direction ("backward"|"forward"), p, alpha, optional y_max,
/// rel_tol, abs_tol. Backward jobs run the shape checks.
ProfileJobResult run_profile_job(const json& params);

json run_critical_alpha_job(const json& params);

struct PdeJobResult {
    PdeRun run;
    json report;
};
PdeJobResult run_pde_job(const json& config);

/// Runs one estimate checker described by config ("check": ...). The report
/// carries a "verdict" field; requirements under "require" may tighten it.
json run_verify_job(const json& config);

json run_sweep_job(const json& config);

/// Dispatcher used by sweep and golden checking.
json run_command(const std::string& command, const json& params);

json report_from_estimate(const EstimateReport& rep);

struct GoldenOutcome {
    bool ok = true;
    std::vector<std::string> mismatches;
};
/// Each record: {"job_id", "command", "params", "expect": {path: {value, tol}},
/// "provenance"}. Paths are dot-separated into the report.
GoldenOutcome check_golden_records(const json& records);

int exit_code_for_verdict(const json& report);

std::string dump_report(const json& report);

void write_trajectory_csv(const ProfileTrajectory& traj, const std::string& path);
void write_snapshot_csv(const PdeRun& run, std::size_t index, const std::string& path);

} // namespace dhj::cli
