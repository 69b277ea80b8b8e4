#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "qdrive/drive_synthesis.hpp"
#include "qdrive/pulse_shapes.hpp"

namespace qdrive {

struct ProbabilityPoint {
    double tau = 0.0;
    double p_plus_to_minus = 0.0; // (1 - d_value)/2, in [0, 1/2)
    double d_value = 1.0;         // sqrt(1 - Phi^2 - (dPhi/dtau)^2)
};

// Finite-time transition probability P(tau) = 1/2 - 1/2 sqrt(1 - Phi^2 - Phi'^2).
inline ProbabilityPoint probability_at(const PulseShape& shape, double tau) {
    const PhiEval e = eval_phi(shape, tau);
    const double dsq = 1.0 - e.phi * e.phi - e.dphi_dtau * e.dphi_dtau;
    if (dsq <= 0.0)
        throw NearSingularError(tau, dsq);
    ProbabilityPoint p;
    p.tau = tau;
    p.d_value = std::sqrt(dsq);
    p.p_plus_to_minus = 0.5 - 0.5 * p.d_value;
    return p;
}

// Infinite-time limit of the probability, depending on endpoint data only:
//   P(inf) = 1/2 - 1/2 / sqrt(1 + u^2),  u = Upsilon(inf)/omega
inline double asymptotic_probability(double upsilon_inf_over_omega) {
    if (!std::isfinite(upsilon_inf_over_omega))
        throw std::invalid_argument("asymptotic_probability: input must be finite");
    if (upsilon_inf_over_omega < 0.0)
        throw std::invalid_argument("asymptotic_probability: negative asymptote not admissible");
    const double u = upsilon_inf_over_omega;
    return 0.5 - 0.5 / std::sqrt(1.0 + u * u);
}

// Constant-drive probability: (u^2/(1+u^2)) sin^2(sqrt(1+u^2) tau / 2).
inline double rabi_probability(double upsilon_over_omega, double tau) {
    if (!(tau >= 0.0))
        throw std::invalid_argument("rabi_probability: tau must be >= 0");
    const double u = upsilon_over_omega;
    const double s = std::sin(0.5 * std::sqrt(1.0 + u * u) * tau);
    return u * u / (1.0 + u * u) * s * s;
}

struct BlochAngles {
    double theta = 0.0;                 // mixing angle, principal branch, [0, pi/4]
    std::optional<double> phi_rel;      // relative phase; absent where Phi ~ 0
};

// Bloch-sphere angles from the closed forms. Admissibility keeps sin(2 theta)
// strictly below 1, so 2 theta never leaves [0, pi/2] and the principal
// arcsin branch is the right one.
inline BlochAngles reconstruct_bloch(const PulseShape& shape, double tau,
                                     double tol_denominator = 1e-6) {
    const PhiEval e = eval_phi(shape, tau);
    const double ssq = e.phi * e.phi + e.dphi_dtau * e.dphi_dtau;
    if (ssq >= 1.0)
        throw NearSingularError(tau, 1.0 - ssq);
    BlochAngles out;
    out.theta = 0.5 * std::asin(std::sqrt(ssq));
    if (e.phi > tol_denominator)
        out.phi_rel = std::atan2(e.dphi_dtau, e.phi);
    return out;
}

} // namespace qdrive
