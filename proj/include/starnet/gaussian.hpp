#pragma once

// Gaussian (continuous-variable) analysis of the star network.
//
// Variance matrices use V_ab = <{x_a, x_b}> over interleaved quadratures, so the
// vacuum is the identity. A passive network acts as V' = T^T V T with T from
// network.hpp. The root is seeded with a squeezed vacuum diag(e^{-r}, e^{r}).

#include <algorithm>
#include <array>
#include <initializer_list>
#include <numbers>
#include <span>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "starnet/errors.hpp"
#include "starnet/fock.hpp"
#include "starnet/network.hpp"

namespace starnet {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPhysicalityTolerance = 1e-9;

/// Eigenvalues of the Hermitian matrix V + i Omega.
inline Eigen::VectorXd uncertainty_spectrum(const Eigen::MatrixXd& v) {
    const auto modes = static_cast<std::size_t>(v.rows() / 2);
    const Eigen::MatrixXcd h = v.cast<Complex>() + Complex(0.0, 1.0) * symplectic_form(modes).cast<Complex>();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

/// Symplectic eigenvalues (ascending) of a symmetric positive-definite matrix.
/// The spectrum of i sqrt(V) Omega sqrt(V) is {+-nu_k}; the positive half is returned.
inline Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& v) {
    if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0) {
        throw dimension_error("symplectic_eigenvalues: matrix must be square with even dimension");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (v + v.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw invalid_state_error("symplectic_eigenvalues: matrix is not positive definite");
    }
    const Eigen::MatrixXd root =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    const auto modes = static_cast<std::size_t>(v.rows() / 2);
    const Eigen::MatrixXcd h =
        Complex(0.0, 1.0) * (root * symplectic_form(modes) * root).cast<Complex>();
    const Eigen::VectorXd spectrum =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
    const auto m = static_cast<Eigen::Index>(modes);
    return spectrum.tail(m);
}

class VarianceMatrix {
public:
    explicit VarianceMatrix(Eigen::MatrixXd matrix) : v_(std::move(matrix)) {
        if (v_.rows() != v_.cols() || v_.rows() == 0 || v_.rows() % 2 != 0) {
            throw dimension_error("VarianceMatrix: matrix must be square with even dimension");
        }
        const double scale = std::max(1.0, v_.cwiseAbs().maxCoeff());
        if ((v_ - v_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
            throw invalid_state_error("VarianceMatrix: not symmetric");
        }
        v_ = 0.5 * (v_ + v_.transpose());
        if (uncertainty_spectrum(v_).minCoeff() < -kPhysicalityTolerance) {
            throw invalid_state_error("VarianceMatrix: violates V + i Omega >= 0");
        }
    }

    const Eigen::MatrixXd& matrix() const noexcept { return v_; }
    std::size_t mode_count() const noexcept { return static_cast<std::size_t>(v_.rows() / 2); }
    double operator()(Eigen::Index r, Eigen::Index c) const { return v_(r, c); }

private:
    Eigen::MatrixXd v_;
};

inline VarianceMatrix vacuum_vm(std::size_t mode_count) {
    if (mode_count == 0) {
        throw range_error("vacuum_vm: need at least one mode");
    }
    const auto dim = static_cast<Eigen::Index>(2 * mode_count);
    return VarianceMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

/// exp(-r sigma_z) = diag(e^{-r}, e^{r}).
inline VarianceMatrix squeezed_root_vm(double r) {
    if (!std::isfinite(r)) {
        throw range_error("squeezed_root_vm: r must be finite");
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 2);
    v(0, 0) = std::exp(-r);
    v(1, 1) = std::exp(r);
    return VarianceMatrix(std::move(v));
}

inline VarianceMatrix direct_sum(const VarianceMatrix& a, const VarianceMatrix& b) {
    const Eigen::Index na = a.matrix().rows();
    const Eigen::Index nb = b.matrix().rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(na + nb, na + nb);
    v.topLeftCorner(na, na) = a.matrix();
    v.bottomRightCorner(nb, nb) = b.matrix();
    return VarianceMatrix(std::move(v));
}

/// Squeezed root followed by N vacuum satellites.
inline VarianceMatrix star_initial_vm(std::size_t satellites, double r) {
    return direct_sum(squeezed_root_vm(r), vacuum_vm(satellites));
}

inline VarianceMatrix apply_transform(const VarianceMatrix& v, const SymplecticTransform& t) {
    if (v.mode_count() != t.mode_count()) {
        throw dimension_error("apply_transform: mode count mismatch");
    }
    return VarianceMatrix(t.matrix().transpose() * v.matrix() * t.matrix());
}

/// Gaussian partial trace: the principal submatrix of the kept modes, in the given order.
inline VarianceMatrix reduce(const VarianceMatrix& v, std::span<const ModeIndex> modes) {
    if (modes.empty()) {
        throw range_error("reduce: no modes selected");
    }
    std::set<ModeIndex> seen;
    for (ModeIndex k : modes) {
        if (k >= v.mode_count() || !seen.insert(k).second) {
            throw range_error("reduce: mode indices must be distinct and in range");
        }
    }
    const auto dim = static_cast<Eigen::Index>(2 * modes.size());
    Eigen::MatrixXd out(dim, dim);
    for (std::size_t a = 0; a < modes.size(); ++a) {
        for (std::size_t b = 0; b < modes.size(); ++b) {
            out.block<2, 2>(static_cast<Eigen::Index>(2 * a), static_cast<Eigen::Index>(2 * b)) =
                v.matrix().block<2, 2>(static_cast<Eigen::Index>(2 * modes[a]),
                                       static_cast<Eigen::Index>(2 * modes[b]));
        }
    }
    return VarianceMatrix(std::move(out));
}

inline VarianceMatrix reduce(const VarianceMatrix& v, std::initializer_list<ModeIndex> modes) {
    return reduce(v, std::span<const ModeIndex>(modes.begin(), modes.size()));
}

/// (det V)^{-1/2}.
inline double purity(const VarianceMatrix& v) {
    const double det = v.matrix().determinant();
    if (!(det > 0.0)) {
        throw invalid_state_error("purity: determinant is not positive");
    }
    return 1.0 / std::sqrt(det);
}

// ---------------------------------------------------------------------------
// Symmetric pair states [[L, C], [C, L]], L = diag(n, m), C = diag(c, d)

struct PairBlocks {
    double n = 1.0;
    double m = 1.0;
    double c = 0.0;
    double d = 0.0;
};

inline constexpr double kPairStructureTolerance = 1e-9;

/// Reads the block entries of a two-mode variance matrix, checking the symmetric
/// diagonal-block structure.
inline PairBlocks pair_blocks(const VarianceMatrix& pair) {
    if (pair.mode_count() != 2) {
        throw dimension_error("pair_blocks: expected a two-mode variance matrix");
    }
    const Eigen::MatrixXd& v = pair.matrix();
    const PairBlocks b{v(0, 0), v(1, 1), v(0, 2), v(1, 3)};
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
    expected(0, 0) = expected(2, 2) = b.n;
    expected(1, 1) = expected(3, 3) = b.m;
    expected(0, 2) = expected(2, 0) = b.c;
    expected(1, 3) = expected(3, 1) = b.d;
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if ((v - expected).cwiseAbs().maxCoeff() > kPairStructureTolerance * scale) {
        throw invalid_state_error("pair_blocks: variance matrix lacks symmetric diagonal-block form");
    }
    return b;
}

/// Pair blocks of any two satellites for uniform couplings:
/// c = (e^r - 1) sin^2(theta_N tau) / N, d = -e^{-r} c, n = 1 + c, m = 1 + d.
inline PairBlocks pair_blocks_closed_form(std::size_t satellites, double r, double thetatau) {
    if (satellites < 2) {
        throw range_error("pair_blocks_closed_form: need at least two satellites");
    }
    const double s = std::sin(thetatau);
    const double c = std::expm1(r) * s * s / static_cast<double>(satellites);
    const double d = -std::exp(-r) * c;
    return PairBlocks{1.0 + c, 1.0 + d, c, d};
}

/// max{0, 1/(delta_1 delta_2) - 1}, delta_1 = n - |c|, delta_2 = m - |d|.
inline double npt_gaussian_pair(const PairBlocks& b) {
    const double d1 = b.n - std::abs(b.c);
    const double d2 = b.m - std::abs(b.d);
    if (!(d1 * d2 > 0.0)) {
        throw invalid_state_error("npt_gaussian_pair: delta_1 delta_2 <= 0");
    }
    return std::max(0.0, 1.0 / (d1 * d2) - 1.0);
}

/// 2(1 - e^{-r}) sin^2 / (N - 2(1 - e^{-r}) sin^2), clipped at zero.
inline double entanglement_closed_form(std::size_t satellites, double r, double thetatau) {
    if (satellites < 2) {
        throw range_error("entanglement_closed_form: need at least two satellites");
    }
    if (!(r >= 0.0)) {
        throw range_error("entanglement_closed_form: r must be nonnegative");
    }
    const double s = std::sin(thetatau);
    const double k = -2.0 * std::expm1(-r) * s * s;
    return std::max(0.0, k / (static_cast<double>(satellites) - k));
}

/// Peak value, reached at theta_N tau = pi/2.
inline double entanglement_max(std::size_t satellites, double r) {
    return entanglement_closed_form(satellites, r, std::numbers::pi / 2.0);
}

/// Relative loss 1 - NPT_{N+1,max} / NPT_{N,max} of qubit pair entanglement.
inline double delta_1(std::size_t satellites) {
    if (satellites < 2) {
        throw range_error("delta_1: need at least two satellites");
    }
    return 1.0 - npt_qubit_max(satellites + 1) / npt_qubit_max(satellites);
}

/// Relative loss 1 - E_{N+1,max} / E_{N,max} of Gaussian pair entanglement.
inline double delta_cv(std::size_t satellites, double r) {
    if (satellites < 2) {
        throw range_error("delta_cv: need at least two satellites");
    }
    if (!(r > 0.0)) {
        throw range_error("delta_cv: r must be positive (E_max vanishes at r = 0)");
    }
    return 1.0 - entanglement_max(satellites + 1, r) / entanglement_max(satellites, r);
}

// ---------------------------------------------------------------------------
// Separability

/// Transposition on the given modes: p -> -p.
inline Eigen::MatrixXd partial_transpose(const VarianceMatrix& v, std::span<const ModeIndex> partition) {
    Eigen::MatrixXd flip = Eigen::MatrixXd::Identity(v.matrix().rows(), v.matrix().rows());
    for (ModeIndex k : partition) {
        flip(static_cast<Eigen::Index>(2 * k + 1), static_cast<Eigen::Index>(2 * k + 1)) = -1.0;
    }
    return flip * v.matrix() * flip;
}

/// PPT test across (partition | rest). Necessary and sufficient for 1 x K Gaussian
/// bipartitions; for larger blocks a separable verdict is only necessary.
inline bool ppt_separability(const VarianceMatrix& v, std::span<const ModeIndex> partition) {
    if (partition.empty() || partition.size() >= v.mode_count()) {
        throw range_error("ppt_separability: partition must be a nonempty proper subset");
    }
    std::set<ModeIndex> seen;
    for (ModeIndex k : partition) {
        if (k >= v.mode_count() || !seen.insert(k).second) {
            throw range_error("ppt_separability: partition indices must be distinct and in range");
        }
    }
    return symplectic_eigenvalues(partial_transpose(v, partition)).minCoeff() >= 1.0 - kPhysicalityTolerance;
}

inline bool ppt_separability(const VarianceMatrix& v, std::initializer_list<ModeIndex> partition) {
    return ppt_separability(v, std::span<const ModeIndex>(partition.begin(), partition.size()));
}

/// True iff every bipartition passes the PPT test.
inline bool ppt_fully_separable(const VarianceMatrix& v) {
    const std::size_t m = v.mode_count();
    if (m < 2) {
        return true;
    }
    // Subsets containing the last mode are complements of ones that do not.
    for (std::size_t mask = 1; mask < (std::size_t{1} << (m - 1)); ++mask) {
        std::vector<ModeIndex> part;
        for (ModeIndex k = 0; k + 1 < m; ++k) {
            if (mask & (std::size_t{1} << k)) {
                part.push_back(k);
            }
        }
        if (!ppt_separability(v, part)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Local equivalence to a two-mode squeezed vacuum

/// Local squeezer diag(e^{-x}, e^{x}) on each listed mode (x per mode); V -> S^T V S
/// scales q-variances by e^{-2x}.
inline SymplecticTransform local_squeezer(std::size_t mode_count, std::span<const double> per_mode) {
    if (per_mode.size() != mode_count) {
        throw dimension_error("local_squeezer: one parameter per mode required");
    }
    const auto dim = static_cast<Eigen::Index>(2 * mode_count);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
    for (std::size_t k = 0; k < mode_count; ++k) {
        s(static_cast<Eigen::Index>(2 * k), static_cast<Eigen::Index>(2 * k)) = std::exp(-per_mode[k]);
        s(static_cast<Eigen::Index>(2 * k + 1), static_cast<Eigen::Index>(2 * k + 1)) = std::exp(per_mode[k]);
    }
    return SymplecticTransform(std::move(s));
}

/// [[cosh 2s I, sinh 2s sigma_z], [sinh 2s sigma_z, cosh 2s I]].
inline VarianceMatrix tmsv_vm(double s) {
    const double ch = std::cosh(2.0 * s);
    const double sh = std::sinh(2.0 * s);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
    v(0, 0) = v(1, 1) = v(2, 2) = v(3, 3) = ch;
    v(0, 2) = v(2, 0) = sh;
    v(1, 3) = v(3, 1) = -sh;
    return VarianceMatrix(std::move(v));
}

/// NPT measure of a two-mode state: the delta-factor formula when the state has
/// the symmetric block form, otherwise 1/nu~^2 - 1 from the smallest symplectic
/// eigenvalue of the partial transpose (the two agree on the block form).
inline double pair_npt(const VarianceMatrix& pair) {
    try {
        return npt_gaussian_pair(pair_blocks(pair));
    } catch (const invalid_state_error&) {
        const ModeIndex second[] = {1};
        const double nu = symplectic_eigenvalues(partial_transpose(pair, second)).minCoeff();
        return std::max(0.0, 1.0 / (nu * nu) - 1.0);
    }
}

struct TmsvFit {
    std::array<double, 2> local_squeeze{}; ///< fitted x per mode
    double residual = 0.0;                 ///< max |S^T V S - TMSV(r/4)|
    double npt_shift = 0.0;                ///< |NPT(V) - NPT(S^T V S)|
};

inline constexpr double kTmsvTolerance = 1e-8;

/// Fits the local squeezers that equalize the q and p variances of each mode,
/// x_k = ln(V_qq / V_pp) / 4, and compares the result with TMSV(r/4).
inline TmsvFit fit_tmsv(const VarianceMatrix& pair, double r) {
    if (pair.mode_count() != 2) {
        throw dimension_error("fit_tmsv: expected a two-mode variance matrix");
    }
    const Eigen::MatrixXd& v = pair.matrix();
    TmsvFit fit;
    fit.local_squeeze = {0.25 * std::log(v(0, 0) / v(1, 1)), 0.25 * std::log(v(2, 2) / v(3, 3))};
    const VarianceMatrix squeezed = apply_transform(pair, local_squeezer(2, fit.local_squeeze));
    fit.residual = (squeezed.matrix() - tmsv_vm(r / 4.0).matrix()).cwiseAbs().maxCoeff();

    fit.npt_shift = std::abs(pair_npt(pair) - pair_npt(squeezed));
    return fit;
}

/// Whether the pair is locally (single-mode squeezing) equivalent to TMSV(r/4).
inline bool tmsv_equivalence_check(const VarianceMatrix& pair, double r) {
    const TmsvFit fit = fit_tmsv(pair, r);
    return fit.residual <= kTmsvTolerance && fit.npt_shift <= 1e-10;
}

} // namespace starnet
