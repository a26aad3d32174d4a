#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "starnet/network.hpp"

using namespace starnet;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

std::size_t count_phase_shifters(const Circuit& c) {
    std::size_t n = 0;
    for (const auto& e : c) {
        n += std::holds_alternative<PhaseShiftPi>(e) ? 1 : 0;
    }
    return n;
}

CouplingVector random_couplings(std::mt19937_64& rng, std::size_t n, bool allow_negative) {
    std::uniform_real_distribution<double> dist(allow_negative ? -2.0 : 0.1, 2.0);
    std::vector<double> g(n);
    for (auto& v : g) {
        v = dist(rng);
    }
    return CouplingVector(g);
}

} // namespace

TEST_CASE("theta accumulates coupling norms", "[network][theta]") {
    CHECK(theta(CouplingVector::uniform(4), 4) == 2.0);
    CHECK(theta(CouplingVector({0.7}), 1) == 0.7);
    CHECK_THAT(theta(CouplingVector({3.0, 4.0}), 2), WithinAbs(5.0, 1e-15));
    CHECK_THROWS_AS(theta(CouplingVector({1.0, 2.0}), 0), starnet::range_error);
    CHECK_THROWS_AS(theta(CouplingVector({1.0, 2.0}), 3), starnet::range_error);
}

TEST_CASE("theta is nondecreasing and squares to the coupling sum", "[network][theta][property]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_couplings(rng, 1 + trial % 7, true);
        double sum = 0.0;
        for (double v : c.values()) {
            sum += v * v;
        }
        for (std::size_t k = 1; k < c.satellites(); ++k) {
            CHECK(theta(c, k) <= theta(c, k + 1));
        }
        CHECK_THAT(theta_total(c) * theta_total(c), WithinAbs(sum, 1e-13 * sum));
    }
}

TEST_CASE("coupling vectors reject degenerate input", "[network][errors]") {
    CHECK_THROWS_AS(CouplingVector({}), starnet::range_error);
    CHECK_THROWS_AS(CouplingVector({0.0, 0.0}), degenerate_coupling_error);
    CHECK_THROWS_AS(CouplingVector({1.0, NAN}), starnet::range_error);
    CHECK_NOTHROW(CouplingVector({0.0, 1.0}));
}

TEST_CASE("epsilon angles", "[network][epsilon]") {
    CHECK_THAT(epsilon(CouplingVector::uniform(2, 0.3), 1), WithinAbs(pi / 4.0, 1e-15));
    CHECK_THAT(epsilon(CouplingVector::uniform(3), 2), WithinAbs(0.9553166181245092, 1e-15));
    CHECK(epsilon(CouplingVector({0.0, 1.5}), 1) == 0.0);
    CHECK_THROWS_AS(epsilon(CouplingVector::uniform(3), 0), starnet::range_error);
    CHECK_THROWS_AS(epsilon(CouplingVector::uniform(3), 3), starnet::range_error);
    CHECK_THROWS_AS(epsilon(CouplingVector({0.0, 0.0, 1.0}), 1), degenerate_coupling_error);

    // For uniform couplings the last fold has cos(eps_{N-1}) = 1/sqrt(N).
    for (std::size_t n = 2; n <= 8; ++n) {
        CHECK_THAT(std::cos(epsilon(CouplingVector::uniform(n), n - 1)),
                   WithinAbs(1.0 / std::sqrt(static_cast<double>(n)), 1e-15));
    }
}

TEST_CASE("compile_circuit structure", "[network][compile]") {
    SECTION("N = 1 is a single beam splitter") {
        const Circuit c = compile_circuit(CouplingVector({0.5}), 2.0);
        REQUIRE(c.size() == 1);
        CHECK(std::get<BeamSplitter>(c.elements()[0]) == BeamSplitter{1, 0, 1.0, -pi / 2.0});
    }
    SECTION("N = 2 uniform: fold, root exchange, unfold") {
        const double g = 0.8;
        const double tau = 0.37;
        const Circuit c = compile_circuit(CouplingVector::uniform(2, g), tau);
        REQUIRE(c.size() == 5);
        const auto& e = c.elements();
        const auto& fold = std::get<BeamSplitter>(e[0]);
        CHECK(fold.mode_hi == 2);
        CHECK(fold.mode_lo == 1);
        CHECK_THAT(fold.angle, WithinAbs(pi / 4.0, 1e-15));
        CHECK(fold.phase == 0.0);
        CHECK(std::get<PhaseShiftPi>(e[1]) == PhaseShiftPi{1});
        const auto& mid = std::get<BeamSplitter>(e[2]);
        CHECK(mid.mode_hi == 2);
        CHECK(mid.mode_lo == 0);
        CHECK_THAT(mid.angle, WithinAbs(std::sqrt(2.0) * g * tau, 1e-15));
        CHECK(mid.phase == -pi / 2.0);
        CHECK(e[3] == e[0]);
        CHECK(e[4] == e[1]);
    }
    SECTION("element counts follow 2(N-1) phase shifters and 2(N-1)+1 beam splitters") {
        for (std::size_t n = 1; n <= 6; ++n) {
            const Circuit c = compile_circuit(CouplingVector::uniform(n), 1.0);
            CHECK(count_phase_shifters(c) == 2 * (n - 1));
            CHECK(c.size() - count_phase_shifters(c) == 2 * (n - 1) + 1);
        }
    }
    SECTION("tau must be finite") {
        CHECK_THROWS_AS(compile_circuit(CouplingVector::uniform(2), INFINITY), starnet::range_error);
    }
}

TEST_CASE("circuit text dump", "[network][compile][format]") {
    CHECK(to_text(compile_circuit(CouplingVector({1.0}), 0.5)) == "BS 1 0 0.5 -1.57079632679\n");
    const std::string two = to_text(compile_circuit(CouplingVector::uniform(2), 1.0));
    CHECK(two ==
          "BS 2 1 0.785398163397 0\n"
          "R 1\n"
          "BS 2 0 1.41421356237 -1.57079632679\n"
          "BS 2 1 0.785398163397 0\n"
          "R 1\n");
}

TEST_CASE("single-excitation matrix", "[network][sector]") {
    const Eigen::MatrixXd h1 = single_excitation_matrix(CouplingVector({0.4}));
    CHECK(h1(0, 1) == 0.4);
    CHECK(h1(1, 0) == 0.4);
    CHECK(h1(0, 0) == 0.0);
    CHECK(h1(1, 1) == 0.0);

    const Eigen::VectorXd ev3 =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(single_excitation_matrix(CouplingVector::uniform(3)))
            .eigenvalues();
    CHECK_THAT(ev3(0), WithinAbs(-std::sqrt(3.0), 1e-14));
    CHECK_THAT(ev3(1), WithinAbs(0.0, 1e-14));
    CHECK_THAT(ev3(2), WithinAbs(0.0, 1e-14));
    CHECK_THAT(ev3(3), WithinAbs(std::sqrt(3.0), 1e-14));

    const Eigen::VectorXd ev34 =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(single_excitation_matrix(CouplingVector({3.0, 4.0})))
            .eigenvalues();
    CHECK_THAT(ev34(0), WithinAbs(-5.0, 1e-13));
    CHECK_THAT(ev34(2), WithinAbs(5.0, 1e-13));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = random_couplings(rng, 2 + trial % 6, true);
        const Eigen::VectorXd ev =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(single_excitation_matrix(c)).eigenvalues();
        const double th = theta_total(c);
        CHECK_THAT(ev(0), WithinAbs(-th, 1e-12));
        CHECK_THAT(ev(ev.size() - 1), WithinAbs(th, 1e-12));
        for (Eigen::Index k = 1; k + 1 < ev.size(); ++k) {
            CHECK_THAT(ev(k), WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("closed-form T", "[network][symplectic]") {
    SECTION("identity at tau = 0") {
        const auto t = symplectic_T(CouplingVector({0.3, -1.2, 0.8}), 0.0);
        CHECK(max_abs(t.matrix() - Eigen::MatrixXd::Identity(8, 8)) == 0.0);
    }
    SECTION("uniform N = 2 at theta tau = pi") {
        const auto c = CouplingVector::uniform(2);
        const Eigen::MatrixXd t = symplectic_T(c, pi / theta_total(c)).matrix();
        CHECK(max_abs(t.block<2, 2>(0, 0) + Eigen::Matrix2d::Identity()) < 1e-15);
        CHECK(max_abs(t.block<2, 4>(0, 2)) < 1e-15);
        CHECK_THAT(t(2, 2), WithinAbs(0.0, 1e-15));
        CHECK_THAT(t(2, 4), WithinAbs(-1.0, 1e-15));
        CHECK_THAT(t(5, 3), WithinAbs(-1.0, 1e-15));
    }
    SECTION("orthogonal, symplectic, unit determinant") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> tdist(-5.0, 5.0);
        for (int trial = 0; trial < 40; ++trial) {
            const auto c = random_couplings(rng, 1 + trial % 6, true);
            const Eigen::MatrixXd t = symplectic_T(c, tdist(rng)).matrix();
            const Eigen::MatrixXd omega = symplectic_form(c.mode_count());
            CHECK(max_abs(t * omega * t.transpose() - omega) < 1e-10);
            CHECK(max_abs(t.transpose() * t - Eigen::MatrixXd::Identity(t.rows(), t.cols())) < 1e-10);
            CHECK_THAT(t.determinant(), WithinAbs(1.0, 1e-10));
        }
    }
    SECTION("matches the phase-space image of exp(-i M tau)") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> tdist(-4.0, 4.0);
        for (int trial = 0; trial < 20; ++trial) {
            const auto c = random_couplings(rng, 1 + trial % 5, true);
            const double tau = tdist(rng);
            const std::vector<double> g(c.values().begin(), c.values().end());
            const Eigen::MatrixXd expected = passive_phase_space_matrix(oracle::sector_propagator(g, tau));
            CHECK(max_abs(symplectic_T(c, tau).matrix() - expected) < 1e-12);
        }
    }
}

TEST_CASE("element phase-space matrices", "[network][symplectic]") {
    const std::size_t m = 3;
    CHECK(max_abs(element_symplectic(BeamSplitter{1, 2, 0.0, 0.7}, m).matrix() - Eigen::MatrixXd::Identity(6, 6)) ==
          0.0);

    const Eigen::MatrixXd r = element_symplectic(PhaseShiftPi{1}, m).matrix();
    CHECK(max_abs(r * r - Eigen::MatrixXd::Identity(6, 6)) == 0.0);
    CHECK(r(2, 2) == -1.0);
    CHECK(r(3, 3) == -1.0);
    CHECK(r(0, 0) == 1.0);

    // Full swap: mode 0 quadratures are fed entirely from mode 2.
    const Eigen::MatrixXd swap = element_symplectic(BeamSplitter{0, 2, pi / 2.0, -pi / 2.0}, m).matrix();
    CHECK(max_abs(swap.block<2, 2>(0, 0)) < 1e-15);
    CHECK(max_abs(swap.block<2, 2>(4, 4)) < 1e-15);
    const Eigen::Matrix2d cross = swap.block<2, 2>(0, 4);
    CHECK(max_abs(cross * cross.transpose() - Eigen::Matrix2d::Identity()) < 1e-15);

    CHECK_THROWS_AS(element_symplectic(PhaseShiftPi{3}, m), starnet::range_error);
    CHECK_THROWS_AS(element_symplectic(BeamSplitter{1, 1, 0.1, 0.0}, m), starnet::range_error);
    Circuit circ(2);
    CHECK_THROWS_AS(circ.push_back(BeamSplitter{0, 2, 0.1, 0.0}), starnet::range_error);
}

TEST_CASE("SymplecticTransform rejects non-symplectic matrices", "[network][symplectic][errors]") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 0) = 2.0;
    CHECK_THROWS_AS(SymplecticTransform(m), invalid_state_error);
    CHECK_THROWS_AS(SymplecticTransform(Eigen::MatrixXd::Identity(3, 3)), dimension_error);
}

TEST_CASE("circuit composition reproduces U(tau)", "[network][decomposition]") {
    CHECK(max_abs(circuit_symplectic(Circuit(3)).matrix() - Eigen::MatrixXd::Identity(6, 6)) == 0.0);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> tdist(-4.0, 4.0);
    for (std::size_t n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto c = random_couplings(rng, n, true);
            const double th = theta_total(c);
            for (double tau : {0.0, pi / (2.0 * th), pi / th, tdist(rng), tdist(rng)}) {
                const Circuit circ = compile_circuit(c, tau);
                CHECK(max_abs(circuit_symplectic(circ).matrix() - symplectic_T(c, tau).matrix()) < 1e-8);
            }
        }
    }
}

TEST_CASE("compiled circuit at tau = 0 is the identity", "[network][decomposition]") {
    for (std::size_t n = 1; n <= 6; ++n) {
        const Circuit circ = compile_circuit(CouplingVector::uniform(n, 0.9), 0.0);
        const auto dim = static_cast<Eigen::Index>(n + 1);
        CHECK(max_abs(circuit_mode_matrix(circ) - Eigen::MatrixXcd::Identity(dim, dim)) < 1e-14);
        CHECK(max_abs(circuit_symplectic(circ).matrix() - Eigen::MatrixXd::Identity(2 * dim, 2 * dim)) < 1e-14);
    }
}

TEST_CASE("zero and negative couplings compile exactly", "[network][decomposition]") {
    for (const auto& g : std::vector<std::vector<double>>{
             {0.0, 0.0, 1.3}, {0.0, -0.4, 0.0, 0.9}, {-1.0}, {-0.5, 0.7, -0.2}, {1.1, 0.0, -2.0}}) {
        const CouplingVector c(g);
        for (double tau : {0.3, 1.7, -2.2}) {
            CHECK(max_abs(circuit_symplectic(compile_circuit(c, tau)).matrix() - symplectic_T(c, tau).matrix()) <
                  1e-12);
            CHECK(max_abs(circuit_mode_matrix(compile_circuit(c, tau)) - oracle::sector_propagator(g, tau)) < 1e-12);
        }
    }
}

TEST_CASE("N = 2 at sqrt(2) G tau = pi acts as a Mach-Zehnder swap of b1 and b2", "[network][decomposition]") {
    const auto c = CouplingVector::uniform(2, 0.6);
    const Eigen::MatrixXcd w = circuit_mode_matrix(compile_circuit(c, pi / theta_total(c)));
    // Excitation on b1 ends on b2 with unit weight, root untouched.
    CHECK_THAT(std::norm(w(2, 1)), WithinAbs(1.0, 1e-14));
    CHECK_THAT(std::norm(w(0, 1)), WithinAbs(0.0, 1e-14));
    CHECK_THAT(w(0, 0).real(), WithinAbs(-1.0, 1e-14));
}

TEST_CASE("flipped beam-splitter convention breaks the decomposition", "[network][decomposition][negative]") {
    const auto c = CouplingVector({0.7, 1.1, 0.4});
    const double tau = 0.9;
    const PhaseSpaceConvention wrong{true};
    CHECK(max_abs(circuit_symplectic(compile_circuit(c, tau), wrong).matrix() - symplectic_T(c, tau).matrix()) > 0.1);
}
