#pragma once

// Command-line front end. Exit codes: 0 success, 1 invalid configuration,
// 2 verification failure, 3 I/O error.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "starnet/starnet.hpp"

namespace starnet::cli {

enum ExitCode : int { kOk = 0, kInvalidConfig = 1, kVerificationFailed = 2, kIoError = 3 };

struct Command {
    ExperimentConfig config;
    std::string out_path;
    bool inject_bs_sign_flip = false;
    std::function<std::string(const ExperimentConfig&)> produce;
};

inline void add_common_options(CLI::App* sub, Command& cmd) {
    sub->add_option("--n", cmd.config.n, "Satellite count(s); comma separated for sweep-cv, N_max for deltas/qubit-table")
        ->delimiter(',');
    sub->add_option("--r", cmd.config.r, "Root squeezing parameter");
    sub->add_option("--couplings", cmd.config.couplings, "Explicit couplings g_1,...,g_N")->delimiter(',');
    sub->add_option("--tau-min", cmd.config.tau_min, "Start of the g = G tau grid");
    sub->add_option("--tau-max", cmd.config.tau_max, "End of the g = G tau grid");
    sub->add_option("--steps", cmd.config.steps, "Number of grid points");
    sub->add_option("--cutoff", cmd.config.cutoff, "Per-mode Fock truncation");
    sub->add_option("--out", cmd.out_path, "Output file (default: stdout)");
}

/// Writes the whole payload or nothing.
inline bool write_output(const std::string& path, const std::string& payload, std::ostream& out) {
    if (path.empty()) {
        out << payload;
        return static_cast<bool>(out);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        return false;
    }
    f << payload;
    f.close();
    return static_cast<bool>(f);
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Entanglement distribution in a star network of bosonic modes"};
    app.require_subcommand(1);

    std::map<std::string, std::unique_ptr<Command>> commands;
    auto make = [&](const std::string& name, const std::string& help, std::vector<std::size_t> default_n,
                    std::function<std::string(const ExperimentConfig&)> produce) {
        auto cmd = std::make_unique<Command>();
        cmd->config.n = std::move(default_n);
        cmd->produce = std::move(produce);
        CLI::App* sub = app.add_subcommand(name, help);
        add_common_options(sub, *cmd);
        auto* raw = cmd.get();
        commands[name] = std::move(cmd);
        return std::pair{sub, raw};
    };

    auto [sweep, sweep_cmd] = make("sweep-cv", "Gaussian pair entanglement E_N against g = G tau", {3, 4, 5}, sweep_cv);
    sweep->add_flag("--pipeline", sweep_cmd->config.pipeline, "Add full phase-space pipeline columns");
    make("deltas", "Relative entanglement loss Delta_1 and Delta_CV for N = 3..N_max", {20}, deltas);
    make("qubit-table", "Concurrence and NPT optima for N = 2..N_max", {10}, qubit_table);
    make("transfer-demo", "b1 -> b2 state transfer probabilities (N = 2)", {2}, transfer_demo);
    auto [comp, comp_cmd] = make("compile", "Print the optical-element circuit of U(tau)", {2}, compile);
    comp->add_option("--tau", comp_cmd->config.tau, "Evolution time");
    auto [ver, ver_cmd] = make("verify", "Run the cross-check suites", {2}, nullptr);
    ver->add_flag("--inject-bs-sign-flip", ver_cmd->inject_bs_sign_flip,
                  "Negative control: flip the beam-splitter phase convention");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    }

    for (const auto& [name, cmd] : commands) {
        if (!app.got_subcommand(name)) {
            continue;
        }
        std::string payload;
        int code = kOk;
        if (name == "verify") {
            try {
                validate_common(cmd->config);
            } catch (const config_error& e) {
                err << "error: " << e.what() << '\n';
                return kInvalidConfig;
            }
            VerifyOptions opt;
            opt.cutoff = cmd->config.cutoff;
            opt.convention.flip_beam_splitter_phase = cmd->inject_bs_sign_flip;
            const auto results = run_verification(opt);
            payload = format_report(results);
            code = all_passed(results) ? kOk : kVerificationFailed;
        } else {
            try {
                payload = cmd->produce(cmd->config);
            } catch (const config_error& e) {
                err << "error: " << e.what() << '\n';
                return kInvalidConfig;
            } catch (const std::invalid_argument& e) {
                err << "error: " << e.what() << '\n';
                return kInvalidConfig;
            } catch (const std::out_of_range& e) {
                err << "error: " << e.what() << '\n';
                return kInvalidConfig;
            }
        }
        if (!write_output(cmd->out_path, payload, out)) {
            err << "error: cannot write " << (cmd->out_path.empty() ? "stdout" : cmd->out_path) << '\n';
            return kIoError;
        }
        return code;
    }
    return kInvalidConfig;
}

} // namespace starnet::cli
