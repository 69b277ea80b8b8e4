#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qdrive/system.hpp"

namespace qdrive {

// Families of auxiliary pulse shapes Phi(tau). Each satisfies Phi(0) = 0 and
// dPhi/dtau(0) = 0 and, within its parameter ranges, 0 <= Phi < 1.
enum class PulseFamily {
    RationalPower,       // Phi_inf * (tau / (gamma^2 + tau))^eta
    EssentialSingularity,// Phi_inf * exp(-gamma / tau)
    GaussianModulated,   // Phi_inf * (1 - exp(-gamma tau^2) cos^2(beta tau))
    Rabi,                // constant drive u: (2u/(1+u^2)) sin^2(sqrt(1+u^2) tau / 2)
};

inline const char* family_name(PulseFamily f) {
    switch (f) {
    case PulseFamily::RationalPower:        return "rational-power";
    case PulseFamily::EssentialSingularity: return "essential-singularity";
    case PulseFamily::GaussianModulated:    return "gaussian-modulated";
    case PulseFamily::Rabi:                 return "rabi";
    }
    return "?";
}

struct PulseShape {
    PulseFamily family = PulseFamily::RationalPower;
    double phi_inf = 0.0;       // asymptote Phi(inf), in [0, 1); unused for Rabi
    double gamma = 1.0;         // shape parameter (families 1-3)
    double eta = 2.0;           // RationalPower exponent
    double beta = 0.0;          // GaussianModulated modulation frequency
    double upsilon_const = 0.0; // Rabi only: constant Upsilon / omega

    static PulseShape rational_power(double phi_inf, double gamma, double eta) {
        PulseShape s;
        s.family = PulseFamily::RationalPower;
        s.phi_inf = phi_inf;
        s.gamma = gamma;
        s.eta = eta;
        s.validate();
        return s;
    }

    static PulseShape essential_singularity(double phi_inf, double gamma) {
        PulseShape s;
        s.family = PulseFamily::EssentialSingularity;
        s.phi_inf = phi_inf;
        s.gamma = gamma;
        s.validate();
        return s;
    }

    static PulseShape gaussian_modulated(double phi_inf, double gamma, double beta) {
        PulseShape s;
        s.family = PulseFamily::GaussianModulated;
        s.phi_inf = phi_inf;
        s.gamma = gamma;
        s.beta = beta;
        s.validate();
        return s;
    }

    static PulseShape rabi(double upsilon_over_omega) {
        PulseShape s;
        s.family = PulseFamily::Rabi;
        s.upsilon_const = upsilon_over_omega;
        s.validate();
        return s;
    }

    // Strict parameter validation; out-of-range values are rejected, never clamped.
    void validate() const {
        switch (family) {
        case PulseFamily::RationalPower:
            require_phi_inf();
            if (!(gamma >= 1.0))
                throw std::invalid_argument("rational-power: gamma must be >= 1");
            if (!(eta >= 2.0))
                throw std::invalid_argument("rational-power: eta must be >= 2");
            break;
        case PulseFamily::EssentialSingularity:
            require_phi_inf();
            if (!(gamma >= 1.0))
                throw std::invalid_argument("essential-singularity: gamma must be >= 1");
            break;
        case PulseFamily::GaussianModulated:
            require_phi_inf();
            if (!(gamma > 0.0 && gamma <= 1.0))
                throw std::invalid_argument("gaussian-modulated: gamma must be in (0, 1]");
            if (!(beta >= 0.0 && beta < 0.25))
                throw std::invalid_argument("gaussian-modulated: beta must be in [0, 1/4)");
            break;
        case PulseFamily::Rabi:
            if (!std::isfinite(upsilon_const))
                throw std::invalid_argument("rabi: upsilon must be finite");
            break;
        }
    }

private:
    void require_phi_inf() const {
        if (!(phi_inf >= 0.0 && phi_inf < 1.0))
            throw std::invalid_argument("phi_inf must be in [0, 1)");
    }
};

// Phi and its first two tau-derivatives, evaluated analytically.
struct PhiEval {
    double phi = 0.0;
    double dphi_dtau = 0.0;
    double d2phi_dtau2 = 0.0;
};

inline PhiEval eval_phi(const PulseShape& shape, double tau) {
    if (!(tau >= 0.0))
        throw std::invalid_argument("eval_phi: tau must be >= 0");
    shape.validate();

    PhiEval out;
    switch (shape.family) {
    case PulseFamily::RationalPower: {
        const double g2 = shape.gamma * shape.gamma;
        const double den = g2 + tau;
        const double s = tau / den;
        out.phi = shape.phi_inf * std::pow(s, shape.eta);
        // d/dtau [tau/(g2+tau)]^eta = eta g2 tau^(eta-1) / (g2+tau)^(eta+1)
        out.dphi_dtau =
            shape.phi_inf * shape.eta * g2 * std::pow(s, shape.eta - 1.0) / (den * den);
        // tau^(eta-2) factor: at tau = 0 only eta = 2 contributes.
        double t_pow;
        if (tau == 0.0)
            t_pow = (shape.eta == 2.0) ? 1.0 : 0.0;
        else
            t_pow = std::pow(s, shape.eta - 2.0);
        out.d2phi_dtau2 = shape.phi_inf * shape.eta * g2 * t_pow *
                          ((shape.eta - 1.0) * g2 - 2.0 * tau) / (den * den * den * den);
        break;
    }
    case PulseFamily::EssentialSingularity: {
        // Phi and every derivative vanish at tau = 0; continuous extension.
        if (tau == 0.0)
            break;
        const double e = std::exp(-shape.gamma / tau);
        const double g = shape.gamma;
        out.phi = shape.phi_inf * e;
        out.dphi_dtau = shape.phi_inf * e * g / (tau * tau);
        out.d2phi_dtau2 =
            shape.phi_inf * e * (g * g / (tau * tau * tau * tau) - 2.0 * g / (tau * tau * tau));
        break;
    }
    case PulseFamily::GaussianModulated: {
        const double e = std::exp(-shape.gamma * tau * tau);
        const double c = std::cos(shape.beta * tau);
        const double c2 = c * c;
        const double s2b = std::sin(2.0 * shape.beta * tau);
        const double c2b = std::cos(2.0 * shape.beta * tau);
        const double g = shape.gamma, b = shape.beta;
        out.phi = shape.phi_inf * (1.0 - e * c2);
        const double q = 2.0 * g * tau * c2 + b * s2b;
        out.dphi_dtau = shape.phi_inf * e * q;
        const double dq = 2.0 * g * c2 - 2.0 * g * tau * b * s2b + 2.0 * b * b * c2b;
        out.d2phi_dtau2 = shape.phi_inf * e * (dq - 2.0 * g * tau * q);
        break;
    }
    case PulseFamily::Rabi: {
        const double u = shape.upsilon_const;
        const double amp = 2.0 * u / (1.0 + u * u);
        const double k = std::sqrt(1.0 + u * u);
        const double half = std::sin(0.5 * k * tau);
        out.phi = amp * half * half;
        out.dphi_dtau = 0.5 * amp * k * std::sin(k * tau);
        out.d2phi_dtau2 = 0.5 * amp * k * k * std::cos(k * tau);
        break;
    }
    }
    return out;
}

struct PointCheck {
    double tau = 0.0;
    double phi = 0.0;
    double constraint_value = 0.0; // Phi^2 + (dPhi/dtau)^2, must stay < 1
    bool phi_in_range = false;     // 0 <= Phi < 1
    bool constraint_ok = false;
};

struct ValidationResult {
    std::vector<PointCheck> points;
    bool initial_conditions_ok = false; // Phi(0) = 0 and Phi'(0) = 0 within 1e-12
    bool pass = false;
};

// Diagnostic grid scan of the admissibility constraints; violations are
// reported, not thrown.
inline ValidationResult validate_shape(const PulseShape& shape, const std::vector<double>& tau_grid) {
    if (tau_grid.empty())
        throw std::invalid_argument("validate_shape: tau_grid must be nonempty");
    if (tau_grid.front() != 0.0)
        throw std::invalid_argument("validate_shape: tau_grid must start at 0");
    for (std::size_t i = 1; i < tau_grid.size(); ++i)
        if (!(tau_grid[i] > tau_grid[i - 1]))
            throw std::invalid_argument("validate_shape: tau_grid must be sorted ascending");

    ValidationResult res;
    res.points.reserve(tau_grid.size());
    bool all_ok = true;
    for (double tau : tau_grid) {
        const PhiEval e = eval_phi(shape, tau);
        PointCheck pc;
        pc.tau = tau;
        pc.phi = e.phi;
        pc.constraint_value = e.phi * e.phi + e.dphi_dtau * e.dphi_dtau;
        pc.phi_in_range = (e.phi >= 0.0 && e.phi < 1.0);
        pc.constraint_ok = (pc.constraint_value < 1.0);
        all_ok = all_ok && pc.phi_in_range && pc.constraint_ok;
        res.points.push_back(pc);
    }
    const PhiEval at0 = eval_phi(shape, 0.0);
    res.initial_conditions_ok = std::abs(at0.phi) <= 1e-12 && std::abs(at0.dphi_dtau) <= 1e-12;
    res.pass = all_ok && res.initial_conditions_ok;
    return res;
}

// Relative phase phi(tau) = atan2(dPhi/dtau, Phi), in (-pi, pi]. Undefined
// where Phi vanishes.
inline double reconstruct_phase(const PulseShape& shape, double tau,
                                double tol_denominator = 1e-6) {
    if (!(tau > 0.0))
        throw std::invalid_argument("reconstruct_phase: tau must be > 0");
    const PhiEval e = eval_phi(shape, tau);
    if (e.phi <= tol_denominator)
        throw DegeneratePhaseError(tau);
    return std::atan2(e.dphi_dtau, e.phi);
}

} // namespace qdrive
