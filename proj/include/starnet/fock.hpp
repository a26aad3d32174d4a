#pragma once

// Discrete-variable dynamics of the star network.
//
//  * SingleExcitationState: exact evolution in the one-excitation sector, where
//    only the collective satellite mode c = sum_j g_j b_j / theta_N talks to the root.
//  * TwoQubitDensityMatrix with concurrence and the partial-transpose measure,
//    using the occupation {|0>, |1>} of a satellite as a qubit.
//  * FockState: truncated multi-mode Fock vector used as a brute-force oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "starnet/errors.hpp"
#include "starnet/network.hpp"

namespace starnet {

inline constexpr double kStateNormTolerance = 1e-12;
inline constexpr double kDensityTolerance = 1e-12;
inline constexpr double kFockNormTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Single-excitation sector

class SingleExcitationState {
public:
    explicit SingleExcitationState(Eigen::VectorXcd amplitudes) : amp_(std::move(amplitudes)) {
        if (amp_.size() < 2) {
            throw range_error("SingleExcitationState: need at least root and one satellite");
        }
        if (std::abs(amp_.squaredNorm() - 1.0) > kStateNormTolerance) {
            throw invalid_state_error("SingleExcitationState: amplitudes are not normalized");
        }
    }

    /// Excitation localized on one mode.
    static SingleExcitationState localized(ModeIndex mode, std::size_t mode_count) {
        if (mode >= mode_count) {
            throw range_error("SingleExcitationState: mode index out of range");
        }
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(mode_count));
        a(static_cast<Eigen::Index>(mode)) = 1.0;
        return SingleExcitationState(std::move(a));
    }

    std::size_t mode_count() const noexcept { return static_cast<std::size_t>(amp_.size()); }
    Complex amplitude(ModeIndex k) const { return amp_(index(k)); }
    double probability(ModeIndex k) const { return std::norm(amp_(index(k))); }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amp_; }

private:
    Eigen::Index index(ModeIndex k) const {
        if (k >= mode_count()) {
            throw range_error("SingleExcitationState: mode index out of range");
        }
        return static_cast<Eigen::Index>(k);
    }

    Eigen::VectorXcd amp_;
};

/// |<a|b>|^2, insensitive to global phase.
inline double fidelity(const SingleExcitationState& a, const SingleExcitationState& b) {
    if (a.mode_count() != b.mode_count()) {
        throw dimension_error("fidelity: mode count mismatch");
    }
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

/// Weight G_jN = g_j sin(theta_N tau) / theta_N of satellite j after a root excitation.
inline double satellite_weight(const CouplingVector& c, std::size_t j, double tau) {
    const double th = theta_total(c);
    if (th == 0.0) {
        throw degenerate_coupling_error("satellite_weight: theta_N is zero");
    }
    return c.coupling(j) * std::sin(th * tau) / th;
}

/// U(tau)|1_a, 0...0> = cos(theta_N tau)|1_a> - i sin(theta_N tau)|1_c>.
inline SingleExcitationState evolve_root_excitation(const CouplingVector& c, double tau) {
    const double th = theta_total(c);
    if (th == 0.0) {
        throw degenerate_coupling_error("evolve_root_excitation: theta_N is zero");
    }
    const auto m = static_cast<Eigen::Index>(c.mode_count());
    Eigen::VectorXcd a(m);
    a(0) = std::cos(th * tau);
    const double s = std::sin(th * tau) / th;
    for (Eigen::Index j = 1; j < m; ++j) {
        a(j) = Complex(0.0, -c.values()[static_cast<std::size_t>(j - 1)] * s);
    }
    return SingleExcitationState(std::move(a));
}

/// General one-excitation evolution: a rotation in span{root, c}, identity on the
/// satellite directions orthogonal to c.
inline SingleExcitationState evolve_single_excitation(const CouplingVector& c, double tau,
                                                      const SingleExcitationState& initial) {
    if (initial.mode_count() != c.mode_count()) {
        throw dimension_error("evolve_single_excitation: mode count mismatch");
    }
    const double th = theta_total(c);
    if (th == 0.0) {
        throw degenerate_coupling_error("evolve_single_excitation: theta_N is zero");
    }
    const auto m = static_cast<Eigen::Index>(c.mode_count());
    Eigen::VectorXd u(m - 1);
    for (Eigen::Index j = 0; j < m - 1; ++j) {
        u(j) = c.values()[static_cast<std::size_t>(j)] / th;
    }

    const Eigen::VectorXcd& in = initial.amplitudes();
    const Complex root = in(0);
    const Eigen::VectorXcd sats = in.tail(m - 1);
    const Complex collective = u.cast<Complex>().dot(sats);
    const Eigen::VectorXcd orthogonal = sats - collective * u.cast<Complex>();

    const double cs = std::cos(th * tau);
    const double sn = std::sin(th * tau);
    const Complex minus_i(0.0, -1.0);

    Eigen::VectorXcd out(m);
    out(0) = cs * root + minus_i * sn * collective;
    out.tail(m - 1) = orthogonal + (minus_i * sn * root + cs * collective) * u.cast<Complex>();
    return SingleExcitationState(std::move(out));
}

/// Single excitation pushed through an optical circuit.
inline SingleExcitationState apply_circuit(const Circuit& circ, const SingleExcitationState& psi) {
    if (circ.mode_count() != psi.mode_count()) {
        throw dimension_error("apply_circuit: mode count mismatch");
    }
    return SingleExcitationState(circuit_mode_matrix(circ) * psi.amplitudes());
}

/// N-satellite W state embedded in the N + 1 mode register (root amplitude 0).
inline SingleExcitationState w_state(std::size_t satellites) {
    if (satellites < 2) {
        throw range_error("w_state: need at least two satellites");
    }
    const auto m = static_cast<Eigen::Index>(satellites + 1);
    Eigen::VectorXcd a = Eigen::VectorXcd::Constant(m, 1.0 / std::sqrt(static_cast<double>(satellites)));
    a(0) = 0.0;
    return SingleExcitationState(std::move(a));
}

// ---------------------------------------------------------------------------
// Two-qubit states and measures

using Matrix4cd = Eigen::Matrix<Complex, 4, 4>;

/// Density matrix in the basis {|00>, |01>, |10>, |11>}.
class TwoQubitDensityMatrix {
public:
    explicit TwoQubitDensityMatrix(const Matrix4cd& entries) : rho_(entries) {
        if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kDensityTolerance) {
            throw invalid_state_error("TwoQubitDensityMatrix: not Hermitian");
        }
        if (std::abs(rho_.trace() - Complex(1.0, 0.0)) > kDensityTolerance) {
            throw invalid_state_error("TwoQubitDensityMatrix: trace differs from 1");
        }
        const Eigen::SelfAdjointEigenSolver<Matrix4cd> es(rho_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kDensityTolerance) {
            throw invalid_state_error("TwoQubitDensityMatrix: not positive semidefinite");
        }
    }

    const Matrix4cd& matrix() const noexcept { return rho_; }
    Complex operator()(Eigen::Index r, Eigen::Index c) const { return rho_(r, c); }

private:
    Matrix4cd rho_;
};

/// Reduced state of satellites (b_i, b_j); b_i is the first qubit.
inline TwoQubitDensityMatrix reduced_pair_density(const SingleExcitationState& s, ModeIndex i, ModeIndex j) {
    const std::size_t n = s.mode_count() - 1;
    if (i == j || i < 1 || j < 1 || i > n || j > n) {
        throw range_error("reduced_pair_density: need two distinct satellite indices in [1, N]");
    }
    const Complex ai = s.amplitude(i);
    const Complex aj = s.amplitude(j);
    // Pure part lives on |01> (b_j excited) and |10> (b_i excited); everything
    // else contributes to |00>.
    Eigen::Vector4cd v(0.0, aj, ai, 0.0);
    Matrix4cd rho = v * v.adjoint();
    rho(0, 0) = std::max(0.0, 1.0 - std::norm(ai) - std::norm(aj));
    return TwoQubitDensityMatrix(rho);
}

namespace detail {

inline Eigen::Matrix4d sigma_y_sigma_y() {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 3) = -1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 0) = -1.0;
    return m;
}

/// Hermitian square root; eigenvalues below the resolution of the solver are
/// treated as exact zeros so their square roots do not inject O(1e-8) noise.
inline Matrix4cd psd_sqrt(const Matrix4cd& rho) {
    const Eigen::SelfAdjointEigenSolver<Matrix4cd> es(rho);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, rho.norm());
    Eigen::Vector4d roots;
    for (Eigen::Index k = 0; k < 4; ++k) {
        const double lam = es.eigenvalues()(k);
        roots(k) = lam > floor ? std::sqrt(lam) : 0.0;
    }
    return es.eigenvectors() * roots.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace detail

/// Wootters concurrence. The alphas are the singular values of
/// sqrt(rho) (sy x sy) sqrt(rho)^*, i.e. the square roots of the eigenvalues of
/// rho (sy x sy) rho^* (sy x sy).
inline double concurrence(const TwoQubitDensityMatrix& rho) {
    const Matrix4cd root = detail::psd_sqrt(rho.matrix());
    const Matrix4cd x = root * detail::sigma_y_sigma_y().cast<Complex>() * root.conjugate();
    const Eigen::JacobiSVD<Matrix4cd> svd(x);
    const Eigen::Vector4d a = svd.singularValues(); // non-increasing
    return std::max(0.0, a(0) - a(1) - a(2) - a(3));
}

/// Partial transpose with respect to the second qubit.
inline Matrix4cd partial_transpose_second(const Matrix4cd& rho) {
    Matrix4cd out;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) {
                for (int d = 0; d < 2; ++d) {
                    out(2 * a + b, 2 * c + d) = rho(2 * a + d, 2 * c + b);
                }
            }
        }
    }
    return out;
}

/// max{0, -2 lambda_min(rho^{T_2})}.
inline double npt_qubit(const TwoQubitDensityMatrix& rho) {
    const Eigen::SelfAdjointEigenSolver<Matrix4cd> es(partial_transpose_second(rho.matrix()),
                                                      Eigen::EigenvaluesOnly);
    return std::max(0.0, -2.0 * es.eigenvalues().minCoeff());
}

/// Pair concurrence for satellite weights G_i, G_j after a root excitation.
inline double concurrence_closed_form(double gi, double gj) { return std::max(0.0, 2.0 * gi * gj); }

inline double npt_qubit_closed_form(double gi, double gj) {
    const double vac = 1.0 - gi * gi - gj * gj;
    return std::max(0.0, std::sqrt(vac * vac + 4.0 * gi * gi * gj * gj) - vac);
}

/// 2/N: best pairwise concurrence, reached by uniform couplings at theta_N tau = pi/2.
inline double concurrence_max(std::size_t satellites) {
    if (satellites < 2) {
        throw range_error("concurrence_max: need at least two satellites");
    }
    return 2.0 / static_cast<double>(satellites);
}

/// {sqrt(4 + (N-2)^2) - (N-2)} / N.
inline double npt_qubit_max(std::size_t satellites) {
    if (satellites < 2) {
        throw range_error("npt_qubit_max: need at least two satellites");
    }
    const double n = static_cast<double>(satellites);
    return (std::sqrt(4.0 + (n - 2.0) * (n - 2.0)) - (n - 2.0)) / n;
}

// ---------------------------------------------------------------------------
// Truncated Fock space

inline constexpr std::size_t kMaxFockDimension = std::size_t{1} << 20;

/// Amplitudes over d^M occupation tuples; mode 0 is the fastest-varying digit.
class FockState {
public:
    FockState(std::size_t mode_count, std::size_t cutoff, Eigen::VectorXcd amplitudes)
        : modes_(mode_count), cutoff_(cutoff), amp_(std::move(amplitudes)) {
        const std::size_t dim = dimension(mode_count, cutoff);
        if (static_cast<std::size_t>(amp_.size()) != dim) {
            throw dimension_error("FockState: amplitude vector has wrong length");
        }
        if (std::abs(amp_.norm() - 1.0) > kFockNormTolerance) {
            throw invalid_state_error("FockState: state is not normalized");
        }
    }

    /// d^M, guarded against exceeding kMaxFockDimension.
    static std::size_t dimension(std::size_t mode_count, std::size_t cutoff) {
        if (cutoff < 2) {
            throw range_error("FockState: cutoff must be at least 2");
        }
        if (mode_count == 0) {
            throw range_error("FockState: need at least one mode");
        }
        std::size_t dim = 1;
        for (std::size_t k = 0; k < mode_count; ++k) {
            if (dim > kMaxFockDimension / cutoff) {
                throw capacity_error("FockState: cutoff^modes exceeds 2^20");
            }
            dim *= cutoff;
        }
        return dim;
    }

    /// Basis state with the given occupations.
    static FockState basis(std::span<const std::size_t> occupations, std::size_t cutoff) {
        const std::size_t dim = dimension(occupations.size(), cutoff);
        std::size_t index = 0;
        std::size_t stride = 1;
        for (std::size_t n : occupations) {
            if (n >= cutoff) {
                throw range_error("FockState: occupation exceeds cutoff - 1");
            }
            index += n * stride;
            stride *= cutoff;
        }
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
        a(static_cast<Eigen::Index>(index)) = 1.0;
        return FockState(occupations.size(), cutoff, std::move(a));
    }

    std::size_t mode_count() const noexcept { return modes_; }
    std::size_t cutoff() const noexcept { return cutoff_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(amp_.size()); }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amp_; }

    std::size_t occupation(std::size_t index, ModeIndex mode) const {
        for (ModeIndex k = 0; k < mode; ++k) {
            index /= cutoff_;
        }
        return index % cutoff_;
    }

    std::size_t stride(ModeIndex mode) const {
        std::size_t s = 1;
        for (ModeIndex k = 0; k < mode; ++k) {
            s *= cutoff_;
        }
        return s;
    }

private:
    std::size_t modes_;
    std::size_t cutoff_;
    Eigen::VectorXcd amp_;
};

inline FockState fock_vacuum(std::size_t mode_count, std::size_t cutoff) {
    const std::vector<std::size_t> occ(mode_count, 0);
    return FockState::basis(occ, cutoff);
}

inline FockState fock_single(ModeIndex mode, std::size_t mode_count, std::size_t cutoff) {
    if (mode >= mode_count) {
        throw range_error("fock_single: mode index out of range");
    }
    std::vector<std::size_t> occ(mode_count, 0);
    occ[mode] = 1;
    return FockState::basis(occ, cutoff);
}

/// <psi|b^dag b|psi>, or the total number when mode is omitted.
inline double number_expectation(const FockState& psi, std::optional<ModeIndex> mode = std::nullopt) {
    double total = 0.0;
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
        const double p = std::norm(psi.amplitudes()(static_cast<Eigen::Index>(idx)));
        if (p == 0.0) {
            continue;
        }
        if (mode) {
            total += p * static_cast<double>(psi.occupation(idx, *mode));
        } else {
            for (ModeIndex k = 0; k < psi.mode_count(); ++k) {
                total += p * static_cast<double>(psi.occupation(idx, k));
            }
        }
    }
    return total;
}

/// Probability carried by basis states with some mode at the truncation edge
/// (occupation d - 1). Nonzero values signal that the truncated ladder operators
/// are no longer faithful.
inline double edge_population(const FockState& psi) {
    double p_edge = 0.0;
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
        for (ModeIndex k = 0; k < psi.mode_count(); ++k) {
            if (psi.occupation(idx, k) + 1 == psi.cutoff()) {
                p_edge += std::norm(psi.amplitudes()(static_cast<Eigen::Index>(idx)));
                break;
            }
        }
    }
    return p_edge;
}

/// |<a|b>|.
inline double overlap_magnitude(const FockState& a, const FockState& b) {
    if (a.size() != b.size()) {
        throw dimension_error("overlap_magnitude: dimension mismatch");
    }
    return std::abs(a.amplitudes().dot(b.amplitudes()));
}

/// Number-conserving quadratic generator sum_t coeff_t a_{to}^dag a_{from}
/// on the truncated space (raising past d - 1 is dropped).
struct QuadraticGenerator {
    struct Term {
        Complex coeff;
        ModeIndex to;
        ModeIndex from;
    };
    std::vector<Term> terms;

    Eigen::VectorXcd apply(const FockState& layout, const Eigen::VectorXcd& v) const {
        const std::size_t d = layout.cutoff();
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
        for (const auto& t : terms) {
            const std::size_t stride_to = layout.stride(t.to);
            const std::size_t stride_from = layout.stride(t.from);
            for (std::size_t idx = 0; idx < layout.size(); ++idx) {
                const Complex amp = v(static_cast<Eigen::Index>(idx));
                if (amp == Complex(0.0, 0.0)) {
                    continue;
                }
                const std::size_t n_from = (idx / stride_from) % d;
                if (n_from == 0) {
                    continue;
                }
                if (t.to == t.from) {
                    out(static_cast<Eigen::Index>(idx)) += t.coeff * static_cast<double>(n_from) * amp;
                    continue;
                }
                const std::size_t n_to = (idx / stride_to) % d;
                if (n_to + 1 >= d) {
                    continue;
                }
                const std::size_t target = idx - stride_from + stride_to;
                const double factor = std::sqrt(static_cast<double>(n_from) * static_cast<double>(n_to + 1));
                out(static_cast<Eigen::Index>(target)) += t.coeff * factor * amp;
            }
        }
        return out;
    }

    /// Upper bound on the operator norm: ||a_i^dag a_j|| <= d - 1.
    double norm_bound(std::size_t cutoff) const {
        double b = 0.0;
        for (const auto& t : terms) {
            b += std::abs(t.coeff);
        }
        return b * static_cast<double>(cutoff - 1);
    }
};

/// exp(G) psi by scaled Taylor series; each substep has ||G||/steps <= 1/2.
inline FockState exp_apply(const QuadraticGenerator& gen, const FockState& psi) {
    const double bound = gen.norm_bound(psi.cutoff());
    const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * bound)));
    QuadraticGenerator scaled = gen;
    for (auto& t : scaled.terms) {
        t.coeff /= static_cast<double>(steps);
    }

    Eigen::VectorXcd v = psi.amplitudes();
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXcd term = v;
        Eigen::VectorXcd acc = v;
        for (int k = 1; k <= 60; ++k) {
            term = scaled.apply(psi, term) / static_cast<double>(k);
            acc += term;
            if (term.norm() <= 1e-18 * acc.norm()) {
                break;
            }
        }
        v = std::move(acc);
    }
    return FockState(psi.mode_count(), psi.cutoff(), std::move(v));
}

/// exp(-i H tau) psi with H = sum_j g_j (a^dag b_j + a b_j^dag) on truncated ladder operators.
inline FockState fock_evolve_direct(const CouplingVector& c, double tau, const FockState& psi) {
    if (psi.mode_count() != c.mode_count()) {
        throw dimension_error("fock_evolve_direct: mode count mismatch");
    }
    QuadraticGenerator gen;
    const Complex minus_i_tau(0.0, -tau);
    for (ModeIndex j = 1; j < c.mode_count(); ++j) {
        const double g = c.coupling(j);
        if (g == 0.0) {
            continue;
        }
        gen.terms.push_back({minus_i_tau * g, 0, j});
        gen.terms.push_back({minus_i_tau * g, j, 0});
    }
    return exp_apply(gen, psi);
}

/// Generator K of an element, with the element equal to exp(K).
inline QuadraticGenerator element_generator(const OpticalElement& e) {
    QuadraticGenerator gen;
    if (const auto* r = std::get_if<PhaseShiftPi>(&e)) {
        gen.terms.push_back({Complex(0.0, std::numbers::pi), r->mode, r->mode});
        return gen;
    }
    const auto& bs = std::get<BeamSplitter>(e);
    const Complex ph = std::polar(1.0, bs.phase);
    gen.terms.push_back({bs.angle * ph, bs.mode_hi, bs.mode_lo});
    gen.terms.push_back({-bs.angle * std::conj(ph), bs.mode_lo, bs.mode_hi});
    return gen;
}

/// Applies each element as the exponential of its generator, first element first.
inline FockState apply_circuit_fock(const Circuit& circ, const FockState& psi) {
    if (circ.mode_count() != psi.mode_count()) {
        throw dimension_error("apply_circuit_fock: mode count mismatch");
    }
    FockState out = psi;
    for (const auto& e : circ) {
        out = exp_apply(element_generator(e), out);
    }
    return out;
}

/// Reduced two-qubit state of modes (i, j) by index arithmetic over the amplitude
/// layout. Requires the pair to carry at most one quantum per mode.
inline TwoQubitDensityMatrix qubit_pair_density(const FockState& psi, ModeIndex i, ModeIndex j) {
    if (i == j || i >= psi.mode_count() || j >= psi.mode_count()) {
        throw range_error("qubit_pair_density: need two distinct valid modes");
    }
    const std::size_t si = psi.stride(i);
    const std::size_t sj = psi.stride(j);
    const std::size_t d = psi.cutoff();
    Matrix4cd rho = Matrix4cd::Zero();
    double outside = 0.0;
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
        const std::size_t ni = (idx / si) % d;
        const std::size_t nj = (idx / sj) % d;
        const Complex amp = psi.amplitudes()(static_cast<Eigen::Index>(idx));
        if (ni > 1 || nj > 1) {
            outside += std::norm(amp);
            continue;
        }
        if (ni != 0 || nj != 0) {
            continue;
        }
        // idx is the (0, 0) representative of an environment configuration.
        const std::array<std::size_t, 4> rows = {idx, idx + sj, idx + si, idx + si + sj};
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t q = 0; q < 4; ++q) {
                rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) +=
                    psi.amplitudes()(static_cast<Eigen::Index>(rows[r])) *
                    std::conj(psi.amplitudes()(static_cast<Eigen::Index>(rows[q])));
            }
        }
    }
    if (outside > kFockNormTolerance) {
        throw invalid_state_error("qubit_pair_density: population outside the qubit subspace");
    }
    return TwoQubitDensityMatrix(rho);
}

} // namespace starnet
