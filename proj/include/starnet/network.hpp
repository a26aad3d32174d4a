#pragma once

// Star-network coupling model: N satellite modes b_1..b_N coupled resonantly to a
// root mode a through H = sum_j g_j (a^dag b_j + a b_j^dag).
//
// Mode indexing convention used everywhere in this library: root = 0,
// satellite b_j = j (1..N). Quadratures are interleaved (q_0, p_0, q_1, p_1, ...).
//
// The global evolution U(tau) = exp(-i H tau) is compiled into a sequence of
// pi phase shifters and beam splitters. Elements are stored in application
// order (first element acts first on a state).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ios>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "starnet/errors.hpp"

namespace starnet {

using Complex = std::complex<double>;
using ModeIndex = std::size_t;

inline constexpr double kSymplecticTolerance = 1e-10;

class CouplingVector {
public:
    explicit CouplingVector(std::vector<double> couplings) : g_(std::move(couplings)) {
        if (g_.empty()) {
            throw range_error("CouplingVector: at least one satellite coupling required");
        }
        bool any_nonzero = false;
        for (double v : g_) {
            if (!std::isfinite(v)) {
                throw range_error("CouplingVector: couplings must be finite");
            }
            any_nonzero = any_nonzero || v != 0.0;
        }
        if (!any_nonzero) {
            throw degenerate_coupling_error("CouplingVector: all couplings are zero");
        }
    }

    static CouplingVector uniform(std::size_t satellites, double value = 1.0) {
        return CouplingVector(std::vector<double>(satellites, value));
    }

    /// Number of satellites N.
    std::size_t satellites() const noexcept { return g_.size(); }
    /// Total number of modes N + 1.
    std::size_t mode_count() const noexcept { return g_.size() + 1; }

    /// Coupling g_j, 1-based as in the satellite labels b_1..b_N.
    double coupling(std::size_t j) const {
        if (j < 1 || j > g_.size()) {
            throw range_error("CouplingVector: satellite index out of range");
        }
        return g_[j - 1];
    }

    std::span<const double> values() const noexcept { return g_; }

private:
    std::vector<double> g_;
};

/// Partial coupling norm sqrt(g_1^2 + ... + g_k^2), 1 <= k <= N.
inline double theta(const CouplingVector& c, std::size_t k) {
    if (k < 1 || k > c.satellites()) {
        throw range_error("theta: k must lie in [1, N]");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        sum += c.values()[j] * c.values()[j];
    }
    return std::sqrt(sum);
}

/// Collective frequency theta_N.
inline double theta_total(const CouplingVector& c) { return theta(c, c.satellites()); }

/// Beam-splitter angle arccos(g_{j+1} / theta_{j+1}) that folds b_j into b_{j+1}.
inline double epsilon(const CouplingVector& c, std::size_t j) {
    if (j < 1 || j + 1 > c.satellites()) {
        throw range_error("epsilon: j must lie in [1, N-1]");
    }
    const double th = theta(c, j + 1);
    if (th == 0.0) {
        throw degenerate_coupling_error("epsilon: theta_{j+1} is zero");
    }
    // Clamp guards |g|/theta = 1 + ulp.
    return std::acos(std::clamp(c.coupling(j + 1) / th, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Optical elements and circuits

/// Fixed pi phase shifter exp(i pi n) on one mode.
struct PhaseShiftPi {
    ModeIndex mode = 0;
    friend bool operator==(const PhaseShiftPi&, const PhaseShiftPi&) = default;
};

/// B(v, phi) = exp[v (x^dag y e^{i phi} - x y^dag e^{-i phi})] with x = mode_hi, y = mode_lo.
struct BeamSplitter {
    ModeIndex mode_hi = 0;
    ModeIndex mode_lo = 0;
    double angle = 0.0;
    double phase = 0.0;
    friend bool operator==(const BeamSplitter&, const BeamSplitter&) = default;
};

using OpticalElement = std::variant<PhaseShiftPi, BeamSplitter>;

inline void validate_element(const OpticalElement& e, std::size_t mode_count) {
    if (const auto* r = std::get_if<PhaseShiftPi>(&e)) {
        if (r->mode >= mode_count) {
            throw range_error("PhaseShiftPi: mode index out of range");
        }
        return;
    }
    const auto& bs = std::get<BeamSplitter>(e);
    if (bs.mode_hi >= mode_count || bs.mode_lo >= mode_count) {
        throw range_error("BeamSplitter: mode index out of range");
    }
    if (bs.mode_hi == bs.mode_lo) {
        throw range_error("BeamSplitter: modes must be distinct");
    }
    if (!std::isfinite(bs.angle) || !std::isfinite(bs.phase)) {
        throw range_error("BeamSplitter: angle and phase must be finite");
    }
}

class Circuit {
public:
    explicit Circuit(std::size_t mode_count) : mode_count_(mode_count) {
        if (mode_count == 0) {
            throw range_error("Circuit: mode_count must be positive");
        }
    }

    void push_back(const OpticalElement& e) {
        validate_element(e, mode_count_);
        elements_.push_back(e);
    }

    std::size_t mode_count() const noexcept { return mode_count_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    const std::vector<OpticalElement>& elements() const noexcept { return elements_; }

    auto begin() const noexcept { return elements_.begin(); }
    auto end() const noexcept { return elements_.end(); }

private:
    std::size_t mode_count_;
    std::vector<OpticalElement> elements_;
};

/// Compiles U(tau) into application-ordered elements:
///   for j = 1..N-1:   BS(b_{j+1}, b_j; eps_j, 0), R(b_j)     (fold satellites into b_N)
///   BS(b_N, a; theta_N tau, -pi/2)                          (collective exchange with root)
///   for j = N-1..1:   BS(b_{j+1}, b_j; eps_j, 0), R(b_j)     (unfold)
/// The unfold half is the inverse of the fold half because R B(eps, 0) R = B(eps, 0)^{-1}.
///
/// The fold maps the collective mode onto +b_N only when g_1 >= 0. For g_1 < 0 the
/// circuit of -g is wrapped in R(a) on both sides, using U(-g) = R_a U(g) R_a.
/// A fold step with theta_{j+1} = 0 has nothing to fold and gets angle 0.
inline Circuit compile_circuit(const CouplingVector& c, double tau) {
    if (!std::isfinite(tau)) {
        throw range_error("compile_circuit: tau must be finite");
    }
    const std::size_t n = c.satellites();
    const double th = theta_total(c);
    if (th == 0.0) {
        throw degenerate_coupling_error("compile_circuit: theta_N is zero");
    }
    if (c.values()[0] < 0.0) {
        std::vector<double> flipped(c.values().begin(), c.values().end());
        for (double& v : flipped) {
            v = -v;
        }
        const Circuit inner = compile_circuit(CouplingVector(std::move(flipped)), tau);
        Circuit circ(n + 1);
        circ.push_back(PhaseShiftPi{0});
        for (const auto& e : inner) {
            circ.push_back(e);
        }
        circ.push_back(PhaseShiftPi{0});
        return circ;
    }

    Circuit circ(n + 1);
    auto fold_step = [&](std::size_t j) {
        const double angle = theta(c, j + 1) == 0.0 ? 0.0 : epsilon(c, j);
        circ.push_back(BeamSplitter{j + 1, j, angle, 0.0});
        circ.push_back(PhaseShiftPi{j});
    };
    for (std::size_t j = 1; j < n; ++j) {
        fold_step(j);
    }
    circ.push_back(BeamSplitter{n, 0, th * tau, -std::numbers::pi / 2.0});
    for (std::size_t j = n - 1; j >= 1; --j) {
        fold_step(j);
    }
    return circ;
}

inline std::string format_real(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

/// One line per element: `R <mode>` or `BS <i> <j> <angle> <phase>`.
inline std::string to_text(const Circuit& circ) {
    std::string out;
    for (const auto& e : circ) {
        if (const auto* r = std::get_if<PhaseShiftPi>(&e)) {
            out += "R " + std::to_string(r->mode) + "\n";
        } else {
            const auto& bs = std::get<BeamSplitter>(e);
            out += "BS " + std::to_string(bs.mode_hi) + " " + std::to_string(bs.mode_lo) + " " +
                   format_real(bs.angle) + " " + format_real(bs.phase) + "\n";
        }
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Circuit& circ) { return os << to_text(circ); }

// ---------------------------------------------------------------------------
// Single-excitation sector

/// Hopping matrix of H restricted to the one-excitation sector: M[0][j] = M[j][0] = g_j.
inline Eigen::MatrixXd single_excitation_matrix(const CouplingVector& c) {
    const auto m = static_cast<Eigen::Index>(c.mode_count());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 1; j < m; ++j) {
        h(0, j) = h(j, 0) = c.values()[static_cast<std::size_t>(j - 1)];
    }
    return h;
}

/// One-particle unitary W of an element: a single excitation with amplitudes psi
/// maps to W psi, and in the Heisenberg picture U^dag a_k U = sum_l W_kl a_l.
inline Eigen::MatrixXcd element_mode_matrix(const OpticalElement& e, std::size_t mode_count) {
    validate_element(e, mode_count);
    const auto m = static_cast<Eigen::Index>(mode_count);
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(m, m);
    if (const auto* r = std::get_if<PhaseShiftPi>(&e)) {
        w(static_cast<Eigen::Index>(r->mode), static_cast<Eigen::Index>(r->mode)) = -1.0;
        return w;
    }
    const auto& bs = std::get<BeamSplitter>(e);
    const auto x = static_cast<Eigen::Index>(bs.mode_hi);
    const auto y = static_cast<Eigen::Index>(bs.mode_lo);
    const double cv = std::cos(bs.angle);
    const double sv = std::sin(bs.angle);
    const Complex ph = std::polar(1.0, bs.phase);
    w(x, x) = cv;
    w(y, y) = cv;
    w(x, y) = ph * sv;
    w(y, x) = -std::conj(ph) * sv;
    return w;
}

/// Product of element mode matrices; the first element acts first.
inline Eigen::MatrixXcd circuit_mode_matrix(const Circuit& circ) {
    const auto m = static_cast<Eigen::Index>(circ.mode_count());
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(m, m);
    for (const auto& e : circ) {
        w = element_mode_matrix(e, circ.mode_count()) * w;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Phase space

/// Block-diagonal symplectic form with blocks [[0, 1], [-1, 0]].
inline Eigen::MatrixXd symplectic_form(std::size_t mode_count) {
    const auto dim = static_cast<Eigen::Index>(2 * mode_count);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; k += 2) {
        omega(k, k + 1) = 1.0;
        omega(k + 1, k) = -1.0;
    }
    return omega;
}

/// Real 2M x 2M phase-space matrix T acting on variance matrices as V' = T^T V T.
/// Composition follows application order: for elements applied first-to-last the
/// total is T_1 T_2 ... T_K.
class SymplecticTransform {
public:
    explicit SymplecticTransform(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0 || matrix_.rows() % 2 != 0) {
            throw dimension_error("SymplecticTransform: matrix must be square with even dimension");
        }
        const auto modes = static_cast<std::size_t>(matrix_.rows() / 2);
        const Eigen::MatrixXd omega = symplectic_form(modes);
        const double scale = std::max(1.0, matrix_.squaredNorm() / static_cast<double>(matrix_.rows()));
        const double defect = (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
        if (defect > kSymplecticTolerance * scale) {
            throw invalid_state_error("SymplecticTransform: matrix is not symplectic (defect " +
                                      format_real(defect) + ")");
        }
    }

    static SymplecticTransform identity(std::size_t mode_count) {
        const auto dim = static_cast<Eigen::Index>(2 * mode_count);
        return SymplecticTransform(Eigen::MatrixXd::Identity(dim, dim));
    }

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    std::size_t mode_count() const noexcept { return static_cast<std::size_t>(matrix_.rows() / 2); }

    /// this followed by next.
    SymplecticTransform then(const SymplecticTransform& next) const {
        if (next.mode_count() != mode_count()) {
            throw dimension_error("SymplecticTransform: mode count mismatch");
        }
        return SymplecticTransform(matrix_ * next.matrix_);
    }

private:
    Eigen::MatrixXd matrix_;
};

/// Phase-space image of a passive one-particle unitary W.
/// With a = (q + i p)/sqrt(2) and W = X + iY, block (k, l) of T is [[X_lk, Y_lk], [-Y_lk, X_lk]].
inline Eigen::MatrixXd passive_phase_space_matrix(const Eigen::MatrixXcd& w) {
    const Eigen::Index m = w.rows();
    Eigen::MatrixXd t(2 * m, 2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index l = 0; l < m; ++l) {
            const double x = w(l, k).real();
            const double y = w(l, k).imag();
            t(2 * k, 2 * l) = x;
            t(2 * k, 2 * l + 1) = y;
            t(2 * k + 1, 2 * l) = -y;
            t(2 * k + 1, 2 * l + 1) = x;
        }
    }
    return t;
}

/// Switches for deliberately wrong conventions; used by negative controls only.
struct PhaseSpaceConvention {
    bool flip_beam_splitter_phase = false;
};

inline SymplecticTransform element_symplectic(const OpticalElement& e, std::size_t mode_count,
                                              PhaseSpaceConvention convention = {}) {
    OpticalElement effective = e;
    if (convention.flip_beam_splitter_phase) {
        if (auto* bs = std::get_if<BeamSplitter>(&effective)) {
            bs->phase = -bs->phase;
        }
    }
    return SymplecticTransform(passive_phase_space_matrix(element_mode_matrix(effective, mode_count)));
}

inline SymplecticTransform circuit_symplectic(const Circuit& circ, PhaseSpaceConvention convention = {}) {
    Eigen::MatrixXd t = SymplecticTransform::identity(circ.mode_count()).matrix();
    for (const auto& e : circ) {
        t = t * element_symplectic(e, circ.mode_count(), convention).matrix();
    }
    return SymplecticTransform(std::move(t));
}

/// Closed-form phase-space matrix of U(tau) with 2x2 blocks:
///   root-root         cos(theta_N tau) I
///   root-satellite n  A_n sigma_y = [[0, -G_n], [G_n, 0]],  G_n = g_n sin(theta_N tau) / theta_N
///   satellite n-m     D_nm I,  D_nm = delta_nm + g_n g_m (cos(theta_N tau) - 1) / theta_N^2
inline SymplecticTransform symplectic_T(const CouplingVector& c, double tau) {
    const double th = theta_total(c);
    if (th == 0.0) {
        throw degenerate_coupling_error("symplectic_T: theta_N is zero");
    }
    const auto m = static_cast<Eigen::Index>(c.mode_count());
    const double cs = std::cos(th * tau);
    const double sn = std::sin(th * tau);
    const auto g = c.values();

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    auto set_block = [&t](Eigen::Index row, Eigen::Index col, double a, double b, double cc, double d) {
        t(2 * row, 2 * col) = a;
        t(2 * row, 2 * col + 1) = b;
        t(2 * row + 1, 2 * col) = cc;
        t(2 * row + 1, 2 * col + 1) = d;
    };
    set_block(0, 0, cs, 0.0, 0.0, cs);
    for (Eigen::Index n = 1; n < m; ++n) {
        const double gn = g[static_cast<std::size_t>(n - 1)];
        const double big_g = gn * sn / th;
        set_block(0, n, 0.0, -big_g, big_g, 0.0);
        set_block(n, 0, 0.0, -big_g, big_g, 0.0);
        for (Eigen::Index k = 1; k < m; ++k) {
            const double gk = g[static_cast<std::size_t>(k - 1)];
            const double d = (n == k ? 1.0 : 0.0) + gn * gk * (cs - 1.0) / (th * th);
            set_block(n, k, d, 0.0, 0.0, d);
        }
    }
    return SymplecticTransform(std::move(t));
}

} // namespace starnet
