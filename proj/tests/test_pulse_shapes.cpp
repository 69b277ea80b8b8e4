#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qdrive/pulse_shapes.hpp"

using namespace qdrive;

namespace {

const double kPhiInf = 2.0 * std::sqrt(2.0) / 3.0;

// Central finite differences, the test-only oracle for the analytic derivatives.
double fd1(const PulseShape& s, double tau, double h) {
    return (eval_phi(s, tau + h).phi - eval_phi(s, tau - h).phi) / (2.0 * h);
}
double fd2(const PulseShape& s, double tau, double h) {
    return (eval_phi(s, tau + h).phi - 2.0 * eval_phi(s, tau).phi + eval_phi(s, tau - h).phi) /
           (h * h);
}

} // namespace

TEST_CASE("parameter validation is strict") {
    CHECK_THROWS_AS(PulseShape::rational_power(1.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(PulseShape::rational_power(-0.1, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(PulseShape::rational_power(0.5, 0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(PulseShape::rational_power(0.5, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(PulseShape::essential_singularity(0.5, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(PulseShape::gaussian_modulated(0.5, 1.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(PulseShape::gaussian_modulated(0.5, 1.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(eval_phi(PulseShape::rational_power(0.5, 1.0, 2.0), -1.0),
                    std::invalid_argument);
}

TEST_CASE("rational-power value and curvature at tau = 0") {
    const auto s = PulseShape::rational_power(kPhiInf, 1.0, 2.0);
    const auto e = eval_phi(s, 0.0);
    CHECK(e.phi == 0.0);
    CHECK(e.dphi_dtau == 0.0);
    // 2 * eta * Phi(inf) / gamma^4 for eta = 2, cross-checked by finite differences
    CHECK_THAT(e.d2phi_dtau2,
               Catch::Matchers::WithinAbs(4.0 * std::sqrt(2.0) / 3.0, 1e-12));
    CHECK_THAT(eval_phi(s, 1e-4).d2phi_dtau2,
               Catch::Matchers::WithinAbs(fd2(s, 1e-4, 1e-4), 1e-6));
    // eta > 2: curvature vanishes at the origin
    CHECK(eval_phi(PulseShape::rational_power(kPhiInf, 1.0, 3.0), 0.0).d2phi_dtau2 == 0.0);
}

TEST_CASE("essential singularity: continuous extension at tau = 0") {
    const auto e = eval_phi(PulseShape::essential_singularity(kPhiInf, 1.0), 0.0);
    CHECK(e.phi == 0.0);
    CHECK(e.dphi_dtau == 0.0);
    CHECK(e.d2phi_dtau2 == 0.0);
}

TEST_CASE("initial conditions hold for every family") {
    const PulseShape shapes[] = {
        PulseShape::rational_power(kPhiInf, 1.0, 2.0),
        PulseShape::essential_singularity(kPhiInf, 1.5),
        PulseShape::gaussian_modulated(kPhiInf, 0.8, 0.1),
        PulseShape::rabi(0.7),
    };
    for (const auto& s : shapes) {
        const auto e = eval_phi(s, 0.0);
        CHECK_THAT(e.phi, Catch::Matchers::WithinAbs(0.0, 1e-15));
        CHECK_THAT(e.dphi_dtau, Catch::Matchers::WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("large tau approaches the asymptote") {
    const double tau = 1e6;
    {
        const auto e = eval_phi(PulseShape::rational_power(kPhiInf, 1.0, 2.0), tau);
        CHECK(std::abs(e.phi - kPhiInf) < 3e-6); // O(1/tau)
        CHECK(std::abs(e.dphi_dtau) < 1e-11);    // O(1/tau^2)
        CHECK(std::abs(e.d2phi_dtau2) < 1e-11);
    }
    {
        const auto e = eval_phi(PulseShape::essential_singularity(kPhiInf, 1.0), tau);
        CHECK(std::abs(e.phi - kPhiInf) < 2e-6);
        CHECK(std::abs(e.dphi_dtau) < 1e-11);
    }
    {
        const auto e = eval_phi(PulseShape::gaussian_modulated(kPhiInf, 1.0, 0.1), tau);
        CHECK(std::abs(e.phi - kPhiInf) < 1e-15); // Gaussian tail underflows
        CHECK(e.dphi_dtau == 0.0);
    }
}

TEST_CASE("rational-power asymptote residual falls faster than 1/tau") {
    const auto s = PulseShape::rational_power(kPhiInf, 1.0, 2.0);
    double prev = 1e300;
    for (double tau : {1e3, 1e4, 1e5}) {
        const double residual =
            std::abs(eval_phi(s, tau).phi - kPhiInf * (1.0 - s.eta * s.gamma * s.gamma / tau));
        CHECK(residual * tau < prev); // tau * o(1/tau) -> 0
        prev = residual * tau;
    }
}

TEST_CASE("analytic derivatives match central finite differences") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double h = 1e-5; // tol_fd
    int checked = 0;
    while (checked < 100) {
        PulseShape s;
        const int fam = static_cast<int>(rng() % 4);
        switch (fam) {
        case 0:
            s = PulseShape::rational_power(0.9 * unit(rng), 1.0 + 2.0 * unit(rng),
                                           2.0 + 2.0 * unit(rng));
            break;
        case 1:
            s = PulseShape::essential_singularity(0.9 * unit(rng), 1.0 + 2.0 * unit(rng));
            break;
        case 2:
            s = PulseShape::gaussian_modulated(0.9 * unit(rng), 0.1 + 0.9 * unit(rng),
                                               0.24 * unit(rng));
            break;
        default:
            s = PulseShape::rabi(0.1 + 0.85 * unit(rng));
            break;
        }
        // stay away from tau = 0 (essential singularity) and keep tau - h > 0
        const double tau = 0.1 + 20.0 * unit(rng);
        const auto e = eval_phi(s, tau);
        const double d1 = fd1(s, tau, h);
        const double d2 = fd2(s, tau, h);
        CHECK(std::abs(e.dphi_dtau - d1) <= 1e-6 * (1.0 + std::abs(d1)));
        CHECK(std::abs(e.d2phi_dtau2 - d2) <= 1e-4 * (1.0 + std::abs(d2)));
        ++checked;
    }
}

TEST_CASE("validate_shape passes the admissible reference shapes") {
    std::vector<double> grid;
    for (int i = 0; i <= 1000; ++i)
        grid.push_back(100.0 * i / 1000.0);

    const auto res = validate_shape(PulseShape::rational_power(kPhiInf, 1.0, 2.0), grid);
    CHECK(res.pass);
    CHECK(res.initial_conditions_ok);

    const auto zero = validate_shape(PulseShape::rational_power(0.0, 1.0, 2.0), grid);
    CHECK(zero.pass);
    for (const auto& pc : zero.points)
        CHECK(pc.phi == 0.0);
}

TEST_CASE("validate_shape reports per-point flags without throwing") {
    const auto s = PulseShape::gaussian_modulated(0.999, 1.0, 0.0);
    std::vector<double> grid;
    for (int i = 0; i <= 5000; ++i)
        grid.push_back(10.0 * i / 5000.0);
    const auto res = validate_shape(s, grid);
    REQUIRE(res.points.size() == grid.size());
    // flags must agree with direct recomputation at every point
    for (const auto& pc : res.points) {
        const auto e = eval_phi(s, pc.tau);
        const double c = e.phi * e.phi + e.dphi_dtau * e.dphi_dtau;
        CHECK(pc.constraint_ok == (c < 1.0));
        CHECK(pc.phi_in_range == (e.phi >= 0.0 && e.phi < 1.0));
    }
}

TEST_CASE("validate_shape rejects malformed grids") {
    const auto s = PulseShape::rational_power(kPhiInf, 1.0, 2.0);
    CHECK_THROWS_AS(validate_shape(s, {}), std::invalid_argument);
    CHECK_THROWS_AS(validate_shape(s, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_shape(s, {0.0, 2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("relative phase reconstruction") {
    const auto ex1 = PulseShape::rational_power(kPhiInf, 1.0, 2.0);
    // asymptotic regime: dPhi -> 0 with Phi > 0, so the phase closes to 0
    CHECK(std::abs(reconstruct_phase(ex1, 1e6)) < 1e-5);
    // at tau = 1 the value and slope coincide, giving exactly pi/4
    CHECK_THAT(reconstruct_phase(ex1, 1.0),
               Catch::Matchers::WithinAbs(0.7853981633974483, 1e-12));
    const auto e = eval_phi(ex1, 1.0);
    CHECK_THAT(reconstruct_phase(ex1, 1.0),
               Catch::Matchers::WithinAbs(std::atan2(e.dphi_dtau, e.phi), 1e-15));

    // Rabi at a local extremum of Phi: slope vanishes, phase is 0
    const double u = 0.8;
    const double tau_ext = M_PI / std::sqrt(1.0 + u * u);
    CHECK(std::abs(reconstruct_phase(PulseShape::rabi(u), tau_ext)) < 1e-12);

    // Phi below tolerance: degenerate phase
    CHECK_THROWS_AS(reconstruct_phase(PulseShape::essential_singularity(kPhiInf, 1.0), 0.01),
                    DegeneratePhaseError);
    CHECK_THROWS_AS(reconstruct_phase(ex1, 0.0), std::invalid_argument);
}
