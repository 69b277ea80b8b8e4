#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qdrive/pulse_shapes.hpp"
#include "qdrive/system.hpp"

namespace qdrive {

struct DriveSample {
    double tau = 0.0;
    double upsilon_over_omega = 0.0;
    double denominator = 1.0; // sqrt(1 - Phi^2 - (dPhi/dtau)^2), in (0, 1]
};

// Generic drive synthesis:
//   Upsilon/omega = (d2Phi/dtau2 + Phi) / sqrt(1 - Phi^2 - (dPhi/dtau)^2)
inline DriveSample synthesize_upsilon(const PulseShape& shape, double tau,
                                      double tol_denominator = 1e-6) {
    const PhiEval e = eval_phi(shape, tau);
    const double dsq = 1.0 - e.phi * e.phi - e.dphi_dtau * e.dphi_dtau;
    if (dsq <= tol_denominator * tol_denominator)
        throw NearSingularError(tau, dsq);
    DriveSample s;
    s.tau = tau;
    s.denominator = std::sqrt(dsq);
    s.upsilon_over_omega = (e.d2phi_dtau2 + e.phi) / s.denominator;
    return s;
}

namespace detail {
inline void require_family(const PulseShape& shape, PulseFamily expected, const char* op) {
    if (shape.family != expected)
        throw std::invalid_argument(std::string(op) + ": shape family mismatch, got " +
                                    family_name(shape.family));
}
} // namespace detail

// Explicit N1/D1 closed form for the rational-power family. The 1/tau^2 terms
// make tau = 0 a removable singularity; that point is taken from the generic path.
inline double closed_form_upsilon_ex1(const PulseShape& shape, double tau,
                                      double tol_denominator = 1e-6) {
    detail::require_family(shape, PulseFamily::RationalPower, "closed_form_upsilon_ex1");
    if (tau == 0.0)
        return synthesize_upsilon(shape, tau, tol_denominator).upsilon_over_omega;
    const double g2 = shape.gamma * shape.gamma;
    const double eta = shape.eta;
    const double phi = shape.phi_inf * std::pow(tau / (g2 + tau), eta);
    const double t2d2 = tau * tau * (g2 + tau) * (g2 + tau);
    const double n1 = (1.0 + eta * g2 * ((eta - 1.0) * g2 - 2.0 * tau) / t2d2) * phi;
    const double d1sq = 1.0 - (1.0 + eta * eta * g2 * g2 / t2d2) * phi * phi;
    if (d1sq <= tol_denominator * tol_denominator)
        throw NearSingularError(tau, d1sq);
    return n1 / std::sqrt(d1sq);
}

// Explicit N2/D2 closed form for the essential-singularity family.
inline double closed_form_upsilon_ex2(const PulseShape& shape, double tau,
                                      double tol_denominator = 1e-6) {
    detail::require_family(shape, PulseFamily::EssentialSingularity, "closed_form_upsilon_ex2");
    if (tau == 0.0)
        return synthesize_upsilon(shape, tau, tol_denominator).upsilon_over_omega;
    const double g = shape.gamma;
    const double e = std::exp(-g / tau);
    const double t2 = tau * tau, t3 = t2 * tau, t4 = t2 * t2;
    const double n2 = shape.phi_inf * (g * g / t4 - 2.0 * g / t3 + 1.0) * e;
    const double d2sq = 1.0 - shape.phi_inf * shape.phi_inf * (1.0 + g * g / t4) * e * e;
    if (d2sq <= tol_denominator * tol_denominator)
        throw NearSingularError(tau, d2sq);
    return n2 / std::sqrt(d2sq);
}

// Explicit N3/D3 closed form for the Gaussian-modulated family. The
// tau*sin(2 beta tau) term in N3 carries a gamma factor; without it the
// expression fails the generic cross-check whenever gamma != 1.
inline double closed_form_upsilon_ex3(const PulseShape& shape, double tau,
                                      double tol_denominator = 1e-6) {
    detail::require_family(shape, PulseFamily::GaussianModulated, "closed_form_upsilon_ex3");
    const double g = shape.gamma, b = shape.beta, p = shape.phi_inf;
    const double e = std::exp(-g * tau * tau);
    const double c = std::cos(b * tau);
    const double c2 = c * c;
    const double s2b = std::sin(2.0 * b * tau);
    const double c2b = std::cos(2.0 * b * tau);
    const double n3 =
        p * (1.0 - ((1.0 + 4.0 * g * g * tau * tau - 2.0 * g) * c2 +
                    4.0 * g * b * tau * s2b - 2.0 * b * b * c2b) * e);
    const double d3sq =
        1.0 - p * p * ((1.0 - c2 * e) * (1.0 - c2 * e) +
                       (2.0 * g * tau * c2 + b * s2b) * (2.0 * g * tau * c2 + b * s2b) * e * e);
    if (d3sq <= tol_denominator * tol_denominator)
        throw NearSingularError(tau, d3sq);
    return n3 / std::sqrt(d3sq);
}

// Upsilon(inf)/omega = Phi(inf) / sqrt(1 - Phi(inf)^2)
inline double upsilon_asymptote(double phi_inf) {
    if (!(phi_inf >= 0.0 && phi_inf < 1.0))
        throw std::invalid_argument("upsilon_asymptote: phi_inf must be in [0, 1)");
    return phi_inf / std::sqrt(1.0 - phi_inf * phi_inf);
}

// Inverse map: Phi(inf) = u / sqrt(1 + u^2) with u = Upsilon(inf)/omega.
inline double phi_from_upsilon(double upsilon_inf_over_omega) {
    if (!(upsilon_inf_over_omega >= 0.0))
        throw std::invalid_argument("phi_from_upsilon: negative asymptote not admissible");
    const double u = upsilon_inf_over_omega;
    return u / std::sqrt(1.0 + u * u);
}

struct AsymptoticsReport {
    bool in_class = false;              // approaches Upsilon(inf) at least as 1/tau, non-constant
    bool constant_drive = false;        // Rabi: no infinite-time limit of the probability
    bool faster_than_polynomial = false;// residuals below threshold on the whole probe tail
    double decay_exponent = 0.0;        // p in |u(tau) - u(inf)| ~ c / tau^p
    double prefactor = 0.0;             // c from the log-log fit
    int points_used = 0;
};

// Fits |Upsilon(tau)/omega - Upsilon(inf)/omega| against c / tau^p over the
// probe points. Probe points whose residual is below 1e-13 are excluded so
// Gaussian-decay underflow does not corrupt the fit.
inline AsymptoticsReport classify_asymptotics(const PulseShape& shape,
                                              const std::vector<double>& tau_probe) {
    if (tau_probe.size() < 2)
        throw std::invalid_argument("classify_asymptotics: need at least two probe points");
    for (std::size_t i = 1; i < tau_probe.size(); ++i)
        if (!(tau_probe[i] > tau_probe[i - 1]))
            throw std::invalid_argument("classify_asymptotics: tau_probe must be ascending");
    if (!(tau_probe.back() >= 100.0 * tau_probe.front()))
        throw std::invalid_argument("classify_asymptotics: probe must span at least two decades");

    AsymptoticsReport rep;
    if (shape.family == PulseFamily::Rabi) {
        rep.constant_drive = true;
        return rep;
    }

    const double u_inf = upsilon_asymptote(shape.phi_inf);
    std::vector<double> lx, ly;
    for (double tau : tau_probe) {
        const double r = std::abs(synthesize_upsilon(shape, tau).upsilon_over_omega - u_inf);
        if (r > 1e-13) {
            lx.push_back(std::log(tau));
            ly.push_back(std::log(r));
        }
    }
    rep.points_used = static_cast<int>(lx.size());
    if (lx.size() < 2) {
        rep.faster_than_polynomial = true;
        rep.in_class = true;
        return rep;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.decay_exponent = -slope;
    rep.prefactor = std::exp((sy - slope * sx) / n);
    rep.in_class = rep.decay_exponent >= 0.9;
    return rep;
}

} // namespace qdrive
