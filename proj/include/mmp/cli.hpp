#pragma once

// Command-line front end. Exit codes: 0 success, 1 validation error,
// 2 runtime integrity error (blow-up, NaN, failed selftest), 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mmp/config.hpp"
#include "mmp/diagnostics.hpp"
#include "mmp/diophantine.hpp"
#include "mmp/errors.hpp"
#include "mmp/fields.hpp"
#include "mmp/integrator.hpp"
#include "mmp/io.hpp"
#include "mmp/selftest.hpp"

namespace mmp {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIntegrity = 2, kExitIo = 3 };

namespace detail {

inline Vec3 parse_alpha_arg(const std::string& s) {
    auto v = parse_real_list(s);
    if (!v || v->size() != 3) throw ConfigError("--alpha expects three comma-separated reals, got '" + s + "'");
    return {(*v)[0], (*v)[1], (*v)[2]};
}

inline std::string checkpoint_name(std::uint64_t step) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "checkpoint_%010llu.mmp", static_cast<unsigned long long>(step));
    return buf;
}

inline int run_command(const std::string& config_path, const std::string& resume_path, std::ostream& out) {
    const RunConfig cfg = load_config(config_path);
    for (const auto& w : cfg.warnings) warn(w);

    const GridSpec grid = cfg.grid();
    const std::filesystem::path dir(cfg.output.dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create output directory: " + ec.message());

    State state(grid);
    RunSinks sinks;
    if (!resume_path.empty()) {
        Checkpoint ck = load_checkpoint(resume_path);
        if (ck.state.grid().n() != grid.n()) throw ConfigError("checkpoint grid n differs from configuration");
        if (ck.variant != cfg.system) throw ConfigError("checkpoint variant differs from configuration");
        if (!(ck.params == cfg.params)) throw ConfigError("checkpoint parameters differ from configuration");
        state = std::move(ck.state);
        sinks.start_step = ck.step;
        sinks.record_initial = false;
    } else {
        state = make_random_state(grid, cfg.init, cfg.system);
    }

    DiagnosticsOptions dopt;
    dopt.high_index = cfg.init.sobolev_index;
    const bool append = !resume_path.empty();
    DiagnosticsWriter diag((dir / "diagnostics.csv").string(), append);

    std::unique_ptr<std::ofstream> sob;
    if (!cfg.output.norms.empty()) {
        const std::string path = (dir / "sobolev.csv").string();
        const bool existing = append && std::filesystem::exists(path);
        sob = std::make_unique<std::ofstream>(path, append ? std::ios::app : std::ios::trunc);
        if (!*sob) throw IoError(path, "cannot open for writing");
        if (!existing) {
            *sob << 't';
            for (double s : cfg.output.norms) *sob << ",H" << format_real(s);
            *sob << '\n';
        }
    }

    sinks.on_record = [&](const State& s, std::uint64_t) {
        diag.write(compute_record(s, cfg.params, cfg.system, dopt));
        if (sob) {
            *sob << format_real(s.t);
            for (double idx : cfg.output.norms) *sob << ',' << format_real(state_norm(s, idx));
            *sob << '\n';
            sob->flush();
            if (!*sob) throw IoError((dir / "sobolev.csv").string(), "write failed");
        }
    };
    sinks.checkpoint_interval = cfg.output.checkpoint_interval;
    sinks.on_checkpoint = [&](const State& s, std::uint64_t step) {
        save_checkpoint({s, cfg.params, cfg.system, step, cfg.init.seed}, (dir / checkpoint_name(step)).string());
    };

    const RunResult res = run(state, cfg.params, cfg.system, cfg.time, sinks);
    save_checkpoint({res.final_state, cfg.params, cfg.system, res.steps, cfg.init.seed}, (dir / "final.mmp").string());

    // A blown-up state has no finite norm.
    std::string h3 = "nan";
    if (res.status != RunStatus::blow_up) h3 = format_real(state_norm(res.final_state, 3.0));
    out << "status=" << to_string(res.status) << '\n'
        << "steps=" << res.steps << '\n'
        << "t=" << format_real(res.final_state.t) << '\n'
        << "h3=" << h3 << '\n';
    if (res.failed_step) out << "failed_step=" << *res.failed_step << '\n';
    if (!res.message.empty()) out << "message=" << res.message << '\n';
    return res.status == RunStatus::blow_up ? kExitIntegrity : kExitOk;
}

}  // namespace detail

/// Entry point of the `mmp` tool; all output goes to `out` / `err`.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Pseudo-spectral magneto-micropolar simulator and diagnostics"};
    app.require_subcommand(1);

    std::string config_path, resume_path;
    auto* run_cmd = app.add_subcommand("run", "Run a simulation from a configuration file");
    run_cmd->add_option("--config", config_path, "configuration file")->required();
    run_cmd->add_option("--resume", resume_path, "checkpoint to resume from");

    std::string alpha_str;
    double r = 2.5;
    int kmax = 16;
    auto* dio_cmd = app.add_subcommand("check-diophantine", "Brute-force Diophantine constant of alpha");
    dio_cmd->add_option("--alpha", alpha_str, "a,b,c")->required();
    dio_cmd->add_option("--r", r, "exponent r")->required();
    dio_cmd->add_option("--kmax", kmax, "search radius |k|_inf <= kmax")->required();

    std::string lemma_alpha;
    double lemma_s = 0.0, lemma_r = 2.5;
    int lemma_n = 16, trials = 100;
    std::uint64_t seed = 42;
    auto* lemma_cmd = app.add_subcommand("verify-lemma", "Probe the lifting inequality on random fields");
    lemma_cmd->add_option("--alpha", lemma_alpha, "a,b,c")->required();
    lemma_cmd->add_option("--s", lemma_s, "Sobolev index s")->required();
    lemma_cmd->add_option("--r", lemma_r, "exponent r")->required();
    lemma_cmd->add_option("--n", lemma_n, "grid size")->required();
    lemma_cmd->add_option("--trials", trials, "number of random fields")->required();
    lemma_cmd->add_option("--seed", seed, "RNG seed")->required();

    std::string csv_path, column, model = "exp";
    double tmin = 0.0;
    auto* fit_cmd = app.add_subcommand("fit-decay", "Fit exponential or algebraic decay to a CSV column");
    fit_cmd->add_option("--csv", csv_path, "CSV file")->required();
    fit_cmd->add_option("--column", column, "column name")->required();
    fit_cmd->add_option("--model", model, "exp|alg")->check(CLI::IsMember({"exp", "alg"}));
    fit_cmd->add_option("--tmin", tmin, "ignore samples with t < tmin");

    auto* self_cmd = app.add_subcommand("selftest", "Run the invariant suite on small grids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (*run_cmd) return detail::run_command(config_path, resume_path, out);

        if (*dio_cmd) {
            out << to_text(check_diophantine(detail::parse_alpha_arg(alpha_str), r, kmax));
            return kExitOk;
        }
        if (*lemma_cmd) {
            const GridSpec g(lemma_n);
            out << to_text(lemma_ratio(detail::parse_alpha_arg(lemma_alpha), lemma_s, lemma_r, g, trials, seed));
            return kExitOk;
        }
        if (*fit_cmd) {
            const auto [t, y] = read_csv_column(csv_path, column);
            const DecayModel m = model == "alg" ? DecayModel::algebraic : DecayModel::exponential;
            const FitReport f = fit_decay(t, y, m, tmin);
            std::ostringstream os;
            os.precision(6);
            os << "model=" << (m == DecayModel::exponential ? "exponential" : "algebraic") << '\n'
               << "samples=" << f.samples << '\n'
               << "C=" << f.c << '\n';
            if (m == DecayModel::exponential) {
                os << "rate=" << f.rate() << '\n';
            } else {
                os << "exponent=" << f.exponent() << '\n';
            }
            os << "r2=" << f.r_squared << '\n';
            out << os.str();
            return kExitOk;
        }
        if (*self_cmd) {
            bool all = true;
            for (const auto& res : run_selftest()) {
                out << (res.passed ? "PASS " : "FAIL ") << res.name << " (" << res.detail << ")\n";
                all = all && res.passed;
            }
            return all ? kExitOk : kExitIntegrity;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IntegrityError& e) {
        err << "integrity error: " << e.what() << '\n';
        return kExitIntegrity;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitValidation;
}

}  // namespace mmp
