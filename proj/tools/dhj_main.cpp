#include "dhj/config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

namespace {

using dhj::cli::json;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

void emit(json report, const std::string& out_path, bool no_timestamp) {
    if (!no_timestamp) report["timestamp"] = iso_timestamp();
    const std::string text = dhj::cli::dump_report(report);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open " + out_path + " for writing");
        os << text;
    }
}

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config " + path);
    json cfg;
    is >> cfg;
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for the diffusive Hamilton-Jacobi equation u_t - Δu = |∇u|^p:"
                 " self-similar profiles, shooting classification, finite-difference runs and"
                 " estimate verification"};
    app.require_subcommand(1);
    bool no_timestamp = false;
    app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp field from reports");

    // context
    auto* cmd_context = app.add_subcommand("context", "derived exponents for a given p");
    double ctx_p = 0.0;
    std::string ctx_out;
    cmd_context->add_option("--p", ctx_p, "exponent p > 1")->required();
    cmd_context->add_option("--out", ctx_out, "output path (default stdout)");

    // profile
    auto* cmd_profile = app.add_subcommand("profile", "integrate a self-similar profile");
    bool backward = false, forward = false;
    double pr_p = 0.0, pr_alpha = 0.0, pr_ymax = 0.0, pr_reltol = 0.0;
    std::string pr_out;
    cmd_profile->add_flag("--backward", backward, "backward (ancient) profile");
    cmd_profile->add_flag("--forward", forward, "forward profile of the absorbing equation");
    cmd_profile->add_option("--p", pr_p, "exponent p > 1")->required();
    cmd_profile->add_option("--alpha", pr_alpha, "initial slope phi'(0)")->required();
    cmd_profile->add_option("--y-max", pr_ymax, "integration horizon");
    cmd_profile->add_option("--rel-tol", pr_reltol, "relative tolerance");
    cmd_profile->add_option("--out", pr_out, "output prefix (<prefix>.csv, <prefix>.json)");

    // critical-alpha
    auto* cmd_crit = app.add_subcommand("critical-alpha", "bisect the J1/J2 boundary (p > 2)");
    double cr_p = 0.0, cr_tol = 1e-6, cr_cap = 800.0;
    std::string cr_out;
    cmd_crit->add_option("--p", cr_p, "exponent p > 2")->required();
    cmd_crit->add_option("--tol", cr_tol, "bracket width tolerance");
    cmd_crit->add_option("--y-max-cap", cr_cap, "largest horizon for undetermined retries");
    cmd_crit->add_option("--out", cr_out, "output path (default stdout)");

    // pde
    auto* cmd_pde = app.add_subcommand("pde", "finite-difference run from a JSON config");
    std::string pde_cfg, pde_out;
    cmd_pde->add_option("--config", pde_cfg, "config path")->required();
    cmd_pde->add_option("--out", pde_out, "output prefix for report and snapshot CSVs");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "run an estimate checker from a JSON config");
    std::string ver_cfg, ver_out;
    cmd_verify->add_option("--config", ver_cfg, "config path")->required();
    cmd_verify->add_option("--out", ver_out, "output path (default stdout)");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "run a job list and merge reports");
    std::string sw_cfg, sw_out;
    cmd_sweep->add_option("--config", sw_cfg, "config path")->required();
    cmd_sweep->add_option("--out", sw_out, "output path (default stdout)");

    // golden
    auto* cmd_golden = app.add_subcommand("golden", "re-run golden records and compare");
    std::string gold_file;
    cmd_golden->add_option("--file", gold_file, "golden records JSON")->required();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);

    if (cmd_context->parsed()) {
        emit(dhj::cli::context_report(ctx_p), ctx_out, no_timestamp);
        return dhj::cli::Ok;
    }
    if (cmd_profile->parsed()) {
        if (backward == forward) {
            std::cerr << "profile: exactly one of --backward/--forward required\n";
            return dhj::cli::UsageError;
        }
        json params;
        params["direction"] = backward ? "backward" : "forward";
        params["p"] = pr_p;
        params["alpha"] = pr_alpha;
        if (pr_ymax > 0) params["y_max"] = pr_ymax;
        if (pr_reltol > 0) params["rel_tol"] = pr_reltol;
        auto res = dhj::cli::run_profile_job(params);
        if (!pr_out.empty()) {
            dhj::cli::write_trajectory_csv(res.trajectory, pr_out + ".csv");
            emit(res.report, pr_out + ".json", no_timestamp);
        } else {
            emit(res.report, "", no_timestamp);
        }
        return res.exit_code;
    }
    if (cmd_crit->parsed()) {
        json params;
        params["p"] = cr_p;
        params["tol"] = cr_tol;
        params["y_max_cap"] = cr_cap;
        emit(dhj::cli::run_critical_alpha_job(params), cr_out, no_timestamp);
        return dhj::cli::Ok;
    }
    if (cmd_pde->parsed()) {
        auto res = dhj::cli::run_pde_job(load_config(pde_cfg));
        if (!pde_out.empty()) {
            for (std::size_t k = 0; k < res.run.snapshots.size(); ++k) {
                dhj::cli::write_snapshot_csv(res.run, k, pde_out + ".snap" + std::to_string(k) + ".csv");
            }
            emit(res.report, pde_out + ".json", no_timestamp);
        } else {
            emit(res.report, "", no_timestamp);
        }
        return dhj::cli::Ok;
    }
    if (cmd_verify->parsed()) {
        json report = dhj::cli::run_verify_job(load_config(ver_cfg));
        emit(report, ver_out, no_timestamp);
        return dhj::cli::exit_code_for_verdict(report);
    }
    if (cmd_sweep->parsed()) {
        json report = dhj::cli::run_sweep_job(load_config(sw_cfg));
        emit(report, sw_out, no_timestamp);
        return dhj::cli::Ok;
    }
    if (cmd_golden->parsed()) {
        auto outcome = dhj::cli::check_golden_records(load_config(gold_file));
        for (const auto& m : outcome.mismatches) std::cerr << "golden mismatch: " << m << "\n";
        std::cout << (outcome.ok ? "golden: all records match\n" : "golden: mismatches found\n");
        return outcome.ok ? dhj::cli::Ok : dhj::cli::VerificationFail;
    }
    return dhj::cli::UsageError;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return dhj::cli::UsageError;
    } catch (const nlohmann::json::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return dhj::cli::UsageError;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return dhj::cli::NumericFailure;
    }
}
