#pragma once

#include <stdexcept>
#include <string>

// Conventions used throughout the library:
//   - natural units, hbar = 1
//   - all public time arguments are dimensionless, tau = omega * t
//   - drive strengths are reported as Upsilon / omega

namespace qdrive {

struct SystemParams {
    double omega = 1.0;            // transverse frequency [1/time], omega > 0
    double tol_denominator = 1e-6; // threshold below which the D-denominator counts as singular
    double tol_fd = 1e-5;          // finite-difference step used by test oracles

    void validate() const {
        if (!(omega > 0.0))
            throw std::invalid_argument("SystemParams: omega must be > 0");
        if (!(tol_denominator > 0.0) || tol_denominator > 1e-6)
            throw std::invalid_argument("SystemParams: tol_denominator must be in (0, 1e-6]");
        if (!(tol_fd > 0.0) || tol_fd > 1e-3)
            throw std::invalid_argument("SystemParams: tol_fd must be in (0, 1e-3]");
    }
};

// Thrown where the D-denominator sqrt(1 - Phi^2 - Phi'^2) is too close to zero.
class NearSingularError : public std::domain_error {
public:
    NearSingularError(double tau, double dsq)
        : std::domain_error("near-singular denominator at tau = " + std::to_string(tau) +
                            " (1 - Phi^2 - Phi'^2 = " + std::to_string(dsq) + ")"),
          tau(tau), denominator_sq(dsq) {}
    double tau;
    double denominator_sq;
};

// Thrown where the relative phase is requested at a point with Phi ~ 0.
class DegeneratePhaseError : public std::domain_error {
public:
    explicit DegeneratePhaseError(double tau)
        : std::domain_error("relative phase undefined at tau = " + std::to_string(tau) +
                            " (Phi below tolerance)"),
          tau(tau) {}
    double tau;
};

} // namespace qdrive
