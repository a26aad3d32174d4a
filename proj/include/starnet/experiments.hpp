#pragma once

// Experiment runners behind the `starnet` command-line tool. Each command
// validates its configuration, computes the full result in memory and returns
// CSV (header row, comma separated, 12 significant digits, LF endings).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starnet/fock.hpp"
#include "starnet/gaussian.hpp"
#include "starnet/network.hpp"

namespace starnet {

/// Rejected experiment configuration (CLI exit code 1).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

struct ExperimentConfig {
    std::vector<std::size_t> n{3, 4, 5};
    double r = 0.8;
    std::optional<std::vector<double>> couplings;
    double tau_min = 0.0;
    double tau_max = 3.0;
    std::size_t steps = 601;
    std::size_t cutoff = 4;
    double tau = 1.0;       ///< single evolution time for `compile`
    bool pipeline = false;  ///< sweep-cv: add full phase-space pipeline columns
};

/// Dimensionless time grid g = G tau with uniform G = 1, so g coincides with tau.
inline std::vector<double> time_grid(const ExperimentConfig& cfg) {
    std::vector<double> g(cfg.steps);
    const double h = (cfg.tau_max - cfg.tau_min) / static_cast<double>(cfg.steps - 1);
    for (std::size_t k = 0; k < cfg.steps; ++k) {
        g[k] = cfg.tau_min + h * static_cast<double>(k);
    }
    g.back() = cfg.tau_max;
    return g;
}

inline void validate_common(const ExperimentConfig& cfg) {
    if (cfg.n.empty()) {
        throw config_error("--n: at least one value required");
    }
    if (!std::isfinite(cfg.r)) {
        throw config_error("--r must be finite");
    }
    if (!std::isfinite(cfg.tau_min) || !std::isfinite(cfg.tau_max) || !(cfg.tau_min < cfg.tau_max)) {
        throw config_error("--tau-min must be smaller than --tau-max");
    }
    if (cfg.steps < 2) {
        throw config_error("--steps must be at least 2");
    }
    if (cfg.cutoff < 2) {
        throw config_error("--cutoff must be at least 2");
    }
    if (cfg.couplings) {
        try {
            CouplingVector check(*cfg.couplings);
        } catch (const std::exception& e) {
            throw config_error(std::string("--couplings: ") + e.what());
        }
    }
}

inline void reject_couplings(const ExperimentConfig& cfg, const char* command) {
    if (cfg.couplings) {
        throw config_error(std::string(command) + " uses uniform couplings; --couplings is not accepted");
    }
}

/// Single N from the config.
inline std::size_t single_n(const ExperimentConfig& cfg, const char* command) {
    if (cfg.n.size() != 1) {
        throw config_error(std::string(command) + " takes a single --n value");
    }
    return cfg.n.front();
}

/// Couplings from --couplings, or uniform 1.0 over N satellites.
inline CouplingVector resolve_couplings(const ExperimentConfig& cfg, std::size_t satellites) {
    if (!cfg.couplings) {
        return CouplingVector::uniform(satellites);
    }
    if (cfg.couplings->size() != satellites) {
        throw config_error("--couplings must list exactly N values");
    }
    return CouplingVector(*cfg.couplings);
}

namespace detail {

inline std::string csv_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) {
            line += ',';
        }
        line += format_real(values[k]);
    }
    return line + '\n';
}

inline std::string csv_header(const std::vector<std::string>& names) {
    std::string line;
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (k > 0) {
            line += ',';
        }
        line += names[k];
    }
    return line + '\n';
}

} // namespace detail

/// Pair entanglement of satellites (1, 2) through the full phase-space pipeline:
/// squeezed root, T(tau), partial trace, NPT of the pair blocks.
inline double pipeline_pair_entanglement(const CouplingVector& c, double r, double tau, ModeIndex i = 1,
                                         ModeIndex j = 2) {
    const VarianceMatrix out = apply_transform(star_initial_vm(c.satellites(), r), symplectic_T(c, tau));
    return npt_gaussian_pair(pair_blocks(reduce(out, {i, j})));
}

/// E_N(g) for each requested N.
inline std::string sweep_cv(const ExperimentConfig& cfg) {
    validate_common(cfg);
    reject_couplings(cfg, "sweep-cv");
    if (cfg.r < 0.0) {
        throw config_error("sweep-cv: --r must be nonnegative");
    }
    for (std::size_t n : cfg.n) {
        if (n < 2) {
            throw config_error("sweep-cv: every N must be at least 2");
        }
    }
    std::vector<std::string> header{"g"};
    for (std::size_t n : cfg.n) {
        header.push_back("E_N" + std::to_string(n));
        if (cfg.pipeline) {
            header.push_back("E_N" + std::to_string(n) + "_pipeline");
        }
    }
    std::string out = detail::csv_header(header);
    for (double g : time_grid(cfg)) {
        std::vector<double> row{g};
        for (std::size_t n : cfg.n) {
            row.push_back(entanglement_closed_form(n, cfg.r, std::sqrt(static_cast<double>(n)) * g));
            if (cfg.pipeline) {
                row.push_back(pipeline_pair_entanglement(CouplingVector::uniform(n), cfg.r, g));
            }
        }
        out += detail::csv_row(row);
    }
    return out;
}

/// Relative pairwise-entanglement losses for N = 3..N_max.
inline std::string deltas(const ExperimentConfig& cfg) {
    validate_common(cfg);
    reject_couplings(cfg, "deltas");
    const std::size_t n_max = single_n(cfg, "deltas");
    if (n_max < 3 || n_max > 50) {
        throw config_error("deltas: N_max must lie in [3, 50]");
    }
    if (!(cfg.r > 0.0)) {
        throw config_error("deltas: --r must be positive");
    }
    std::string out = detail::csv_header({"N", "delta_1", "delta_cv"});
    for (std::size_t n = 3; n <= n_max; ++n) {
        out += detail::csv_row({static_cast<double>(n), delta_1(n), delta_cv(n, cfg.r)});
    }
    return out;
}

struct QubitOptimum {
    double concurrence = 0.0;
    double npt = 0.0;
};

/// Pair measures of satellites (1, 2) at theta_N tau = pi/2, uniform couplings,
/// computed from the reduced density matrix.
inline QubitOptimum measured_qubit_optimum(std::size_t satellites) {
    const CouplingVector c = CouplingVector::uniform(satellites);
    const double tau = std::numbers::pi / (2.0 * theta_total(c));
    const TwoQubitDensityMatrix rho = reduced_pair_density(evolve_root_excitation(c, tau), 1, 2);
    return {concurrence(rho), npt_qubit(rho)};
}

/// C_max and NPT_max for N = 2..N_max, measured against closed forms.
inline std::string qubit_table(const ExperimentConfig& cfg) {
    validate_common(cfg);
    reject_couplings(cfg, "qubit-table");
    const std::size_t n_max = single_n(cfg, "qubit-table");
    if (n_max < 2 || n_max > 200) {
        throw config_error("qubit-table: N_max must lie in [2, 200]");
    }
    std::string out = detail::csv_header({"N", "C_max_measured", "C_max_closed_form", "NPT_max_measured",
                                          "NPT_max_closed_form"});
    for (std::size_t n = 2; n <= n_max; ++n) {
        const QubitOptimum m = measured_qubit_optimum(n);
        out += detail::csv_row({static_cast<double>(n), m.concurrence, concurrence_max(n), m.npt, npt_qubit_max(n)});
    }
    return out;
}

/// Occupation probabilities for an excitation starting on b_1 of a two-satellite star.
inline std::string transfer_demo(const ExperimentConfig& cfg) {
    validate_common(cfg);
    if (single_n(cfg, "transfer-demo") != 2) {
        throw config_error("transfer-demo: requires N = 2");
    }
    const CouplingVector c = resolve_couplings(cfg, 2);
    const SingleExcitationState start = SingleExcitationState::localized(1, 3);
    std::string out = detail::csv_header({"g", "P_root", "P_b1", "P_b2"});
    for (double g : time_grid(cfg)) {
        const SingleExcitationState s = evolve_single_excitation(c, g, start);
        out += detail::csv_row({g, s.probability(0), s.probability(1), s.probability(2)});
    }
    return out;
}

/// Element list of U(tau) in the plain-text dump format.
inline std::string compile(const ExperimentConfig& cfg) {
    validate_common(cfg);
    if (!std::isfinite(cfg.tau)) {
        throw config_error("--tau must be finite");
    }
    std::size_t n = 0;
    if (cfg.couplings) {
        n = cfg.couplings->size();
    } else {
        n = single_n(cfg, "compile");
        if (n < 1) {
            throw config_error("compile: N must be at least 1");
        }
    }
    return to_text(compile_circuit(resolve_couplings(cfg, n), cfg.tau));
}

} // namespace starnet
