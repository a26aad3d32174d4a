#pragma once

// Self-check suites run by `starnet verify`. Every suite compares two independent
// routes to the same quantity and reports the worst deviation it saw.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "starnet/experiments.hpp"
#include "starnet/fock.hpp"
#include "starnet/gaussian.hpp"
#include "starnet/network.hpp"

namespace starnet {

struct SuiteResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;     ///< largest deviation observed
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    std::size_t cutoff = 4;
    PhaseSpaceConvention convention{}; ///< non-default only for negative controls
    std::uint64_t seed = 20070403;
};

namespace detail {

/// Random couplings in [0.2, 2], with the sign of non-leading entries randomized.
inline CouplingVector random_couplings(std::mt19937_64& rng, std::size_t satellites) {
    std::uniform_real_distribution<double> mag(0.2, 2.0);
    std::bernoulli_distribution negative(0.25);
    std::vector<double> g(satellites);
    for (std::size_t j = 0; j < satellites; ++j) {
        g[j] = mag(rng) * (j > 0 && negative(rng) ? -1.0 : 1.0);
    }
    return CouplingVector(std::move(g));
}

/// tau values covering 0, the odd and even quarter periods and random points.
inline std::vector<double> tau_samples(std::mt19937_64& rng, double theta_n, std::size_t random_count) {
    std::vector<double> taus{0.0, std::numbers::pi / (2.0 * theta_n), std::numbers::pi / theta_n};
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (std::size_t k = 0; k < random_count; ++k) {
        taus.push_back(dist(rng));
    }
    return taus;
}

template <typename Body>
SuiteResult run_suite(std::string name, double tolerance, Body&& body) {
    SuiteResult res{std::move(name), false, 0.0, tolerance, {}};
    try {
        res.worst = body(res.detail);
        res.passed = res.worst <= tolerance;
    } catch (const std::exception& e) {
        res.passed = false;
        res.worst = std::numeric_limits<double>::infinity();
        res.detail = std::string("exception: ") + e.what();
    }
    return res;
}

inline double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

} // namespace detail

inline std::vector<SuiteResult> run_verification(const VerifyOptions& opt = {}) {
    std::vector<SuiteResult> out;
    std::mt19937_64 rng(opt.seed);

    out.push_back(detail::run_suite("decomposition: circuit vs closed-form T", 1e-8, [&](std::string&) {
        double worst = 0.0;
        for (std::size_t n = 1; n <= 5; ++n) {
            for (int trial = 0; trial < 10; ++trial) {
                const CouplingVector c = detail::random_couplings(rng, n);
                for (double tau : detail::tau_samples(rng, theta_total(c), 5)) {
                    const auto lhs = circuit_symplectic(compile_circuit(c, tau), opt.convention);
                    worst = std::max(worst, detail::max_abs(lhs.matrix() - symplectic_T(c, tau).matrix()));
                }
            }
        }
        return worst;
    }));

    out.push_back(detail::run_suite("decomposition: circuit vs direct Fock exponential", 1e-7, [&](std::string& d) {
        double worst = 0.0;
        const std::size_t cutoff = opt.cutoff;
        for (std::size_t n = 1; n <= 3; ++n) {
            const CouplingVector c = detail::random_couplings(rng, n);
            const std::size_t m = n + 1;
            std::vector<FockState> inputs;
            for (ModeIndex k = 0; k < m; ++k) {
                inputs.push_back(fock_single(k, m, cutoff));
            }
            if (cutoff >= 3) {
                std::vector<std::size_t> occ(m, 0);
                occ[0] = 2;
                inputs.push_back(FockState::basis(occ, cutoff));
                occ[0] = 1;
                occ[m - 1] += 1;
                inputs.push_back(FockState::basis(occ, cutoff));
            }
            for (double tau : detail::tau_samples(rng, theta_total(c), 2)) {
                const Circuit circ = compile_circuit(c, tau);
                for (const auto& psi : inputs) {
                    const FockState direct = fock_evolve_direct(c, tau, psi);
                    const FockState via = apply_circuit_fock(circ, psi);
                    worst = std::max(worst, (direct.amplitudes() - via.amplitudes()).cwiseAbs().maxCoeff());
                }
            }
        }
        d = "cutoff " + std::to_string(cutoff);
        return worst;
    }));

    out.push_back(detail::run_suite("single excitation: Fock oracle vs collective-mode solution", 1e-9,
                                    [&](std::string&) {
        double worst = 0.0;
        for (std::size_t n = 1; n <= 4; ++n) {
            const CouplingVector c = detail::random_couplings(rng, n);
            for (double tau : detail::tau_samples(rng, theta_total(c), 3)) {
                const SingleExcitationState s = evolve_root_excitation(c, tau);
                const FockState f = fock_evolve_direct(c, tau, fock_single(0, n + 1, opt.cutoff));
                for (ModeIndex k = 0; k <= n; ++k) {
                    const auto idx = static_cast<Eigen::Index>(f.stride(k));
                    worst = std::max(worst, std::abs(f.amplitudes()(idx) - s.amplitude(k)));
                }
            }
        }
        return worst;
    }));

    out.push_back(detail::run_suite("closed-form E_N vs phase-space pipeline", 1e-10, [&](std::string&) {
        double worst = 0.0;
        for (std::size_t n = 2; n <= 6; ++n) {
            const CouplingVector c = CouplingVector::uniform(n);
            for (double r : {0.0, 0.3, 0.8, 1.5}) {
                for (int k = 0; k <= 24; ++k) {
                    const double tau = 3.0 * k / 24.0;
                    const VarianceMatrix v =
                        apply_transform(star_initial_vm(n, r), symplectic_T(c, tau));
                    const double expected = entanglement_closed_form(n, r, theta_total(c) * tau);
                    for (ModeIndex i = 1; i <= n; ++i) {
                        for (ModeIndex j = i + 1; j <= n; ++j) {
                            const double e = npt_gaussian_pair(pair_blocks(reduce(v, {i, j})));
                            worst = std::max(worst, std::abs(e - expected));
                        }
                    }
                }
            }
        }
        return worst;
    }));

    out.push_back(detail::run_suite("qubit optima and W-state generation", 1e-12, [&](std::string&) {
        double worst = 0.0;
        for (std::size_t n = 2; n <= 10; ++n) {
            const QubitOptimum m = measured_qubit_optimum(n);
            worst = std::max(worst, std::abs(m.concurrence - concurrence_max(n)));
            worst = std::max(worst, std::abs(m.npt - npt_qubit_max(n)));
            const CouplingVector c = CouplingVector::uniform(n);
            const SingleExcitationState s = evolve_root_excitation(c, std::numbers::pi / (2.0 * theta_total(c)));
            worst = std::max(worst, std::abs(1.0 - fidelity(w_state(n), s)));
            worst = std::max(worst, std::abs(s.amplitude(0)));
        }
        return worst;
    }));

    out.push_back(detail::run_suite("state transfer b1 -> b2 through the root", 1e-10, [&](std::string&) {
        const CouplingVector c = CouplingVector::uniform(2);
        const auto start = SingleExcitationState::localized(1, 3);
        const double t_full = std::numbers::pi / std::sqrt(2.0);
        const SingleExcitationState s = evolve_single_excitation(c, t_full, start);
        double worst = std::abs(1.0 - s.probability(2));
        // The Mach-Zehnder form of the compiled circuit gives the same transfer.
        const SingleExcitationState mz = apply_circuit(compile_circuit(c, t_full), start);
        worst = std::max(worst, std::abs(1.0 - mz.probability(2)));
        return worst;
    }));

    out.push_back(detail::run_suite("purity and separability schedule", 1e-9, [&](std::string& d) {
        double worst = 0.0;
        bool ok = true;
        for (double r : {0.2, 0.8, 1.5}) {
            for (std::size_t n : {2, 3}) {
                const CouplingVector c = CouplingVector::uniform(n);
                const double th = theta_total(c);
                const VarianceMatrix odd =
                    apply_transform(star_initial_vm(n, r), symplectic_T(c, std::numbers::pi / (2.0 * th)));
                const VarianceMatrix even =
                    apply_transform(star_initial_vm(n, r), symplectic_T(c, std::numbers::pi / th));
                worst = std::max(worst, std::abs(1.0 - purity(reduce(even, {1, 2}))));
                if (n == 2) {
                    worst = std::max(worst, std::abs(1.0 - purity(reduce(odd, {1, 2}))));
                    ok = ok && ppt_fully_separable(even);
                    ok = ok && ppt_separability(odd, {0});
                    ok = ok && !ppt_separability(reduce(odd, {1, 2}), {0});
                } else {
                    ok = ok && purity(reduce(odd, {1, 2})) < 1.0 - 1e-6;
                }
            }
        }
        if (!ok) {
            d = "separability or impurity verdict wrong";
            return std::numeric_limits<double>::infinity();
        }
        return worst;
    }));

    out.push_back(detail::run_suite("two-mode squeezed vacuum equivalence (N = 2 only)", 0.0, [&](std::string& d) {
        for (double r : {0.2, 0.8, 1.5}) {
            for (std::size_t n : {2, 3}) {
                const CouplingVector c = CouplingVector::uniform(n);
                const VarianceMatrix v = apply_transform(
                    star_initial_vm(n, r), symplectic_T(c, std::numbers::pi / (2.0 * theta_total(c))));
                if (tmsv_equivalence_check(reduce(v, {1, 2}), r) != (n == 2)) {
                    d = "wrong verdict at N = " + std::to_string(n);
                    return 1.0;
                }
            }
        }
        return 0.0;
    }));

    out.push_back(detail::run_suite("invariants: symplecticity, periodicity, norm, physicality", 1e-9,
                                    [&](std::string&) {
        double worst = 0.0;
        std::uniform_real_distribution<double> rdist(0.0, 2.0);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
            const CouplingVector c = detail::random_couplings(rng, n);
            const double th = theta_total(c);
            const double tau = detail::tau_samples(rng, th, 1).back();
            const Eigen::MatrixXd t = symplectic_T(c, tau).matrix();
            const Eigen::MatrixXd omega = symplectic_form(n + 1);
            worst = std::max(worst, detail::max_abs(t * omega * t.transpose() - omega));
            worst = std::max(worst, detail::max_abs(t.transpose() * t - Eigen::MatrixXd::Identity(t.rows(), t.cols())));
            const auto a = evolve_root_excitation(c, tau).amplitudes();
            const auto b = evolve_root_excitation(c, tau + 2.0 * std::numbers::pi / th).amplitudes();
            worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
            // Norm preservation; the state constructors also enforce it.
            const FockState f = fock_evolve_direct(c, tau, fock_single(0, n + 1, 3));
            worst = std::max(worst, std::abs(1.0 - f.amplitudes().norm()));
            const VarianceMatrix v = apply_transform(star_initial_vm(n, rdist(rng)), symplectic_T(c, tau));
            worst = std::max(worst, std::max(0.0, 1.0 - symplectic_eigenvalues(v.matrix()).minCoeff()));
        }
        return worst;
    }));

    return out;
}

inline bool all_passed(const std::vector<SuiteResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const SuiteResult& r) { return r.passed; });
}

inline std::string format_report(const std::vector<SuiteResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += (r.passed ? "[PASS] " : "[FAIL] ") + r.name + "  (worst " + format_real(r.worst) + ", tol " +
               format_real(r.tolerance) + ")";
        if (!r.detail.empty()) {
            out += "  " + r.detail;
        }
        out += '\n';
    }
    return out;
}

} // namespace starnet
