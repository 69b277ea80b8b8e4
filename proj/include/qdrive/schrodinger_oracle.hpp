#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qdrive/drive_synthesis.hpp"
#include "qdrive/pulse_shapes.hpp"
#include "qdrive/transition_probability.hpp"

namespace qdrive {

// Amplitudes in the sigma_x eigenbasis: the system starts in |+> and the
// transition probability is |c_minus|^2.
struct QubitState {
    std::complex<double> c_plus{1.0, 0.0};
    std::complex<double> c_minus{0.0, 0.0};

    double norm_sq() const { return std::norm(c_plus) + std::norm(c_minus); }
    double transition_probability() const { return std::norm(c_minus); }
};

struct OracleTrajectory {
    std::vector<double> taus;
    std::vector<double> probabilities;
    double norm_drift = 0.0; // max |  ||psi||^2 - 1 | over the run
    long steps_taken = 0;
    double tolerance = 0.0;
};

struct PointwiseComparison {
    double tau = 0.0;
    double closed_form_p = 0.0;
    double oracle_p = 0.0;
    double diff = 0.0;
};

struct VerificationReport {
    double max_abs_error = 0.0;
    double tau_of_max = 0.0;
    std::vector<PointwiseComparison> pointwise;
};

class StepUnderflowError : public std::runtime_error {
public:
    explicit StepUnderflowError(double tau)
        : std::runtime_error("integrator step size underflow at tau = " + std::to_string(tau)),
          tau(tau) {}
    double tau;
};

class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

using DriveFn = std::function<double(double)>; // tau -> Upsilon(tau)/omega

namespace detail {

using State = std::array<std::complex<double>, 2>;

// dpsi/dtau = -i M(tau) psi with M = 1/2 [[1, u], [u, -1]]: sigma_x is
// diagonal in this basis and the sigma_z drive is the off-diagonal flip.
// sign = -1 integrates with the negated generator.
inline State rhs(const DriveFn& drive, double tau, const State& y, double sign) {
    const double u = drive(tau);
    const std::complex<double> mi(0.0, -sign);
    return {mi * 0.5 * (y[0] + u * y[1]), mi * 0.5 * (u * y[0] - y[1])};
}

// Dormand-Prince 5(4) embedded pair.
struct Dopri5 {
    static constexpr int stages = 7;
    // clang-format off
    static constexpr double c[7]    = {0.0, 1.0/5, 3.0/10, 4.0/5, 8.0/9, 1.0, 1.0};
    static constexpr double a2[1]   = {1.0/5};
    static constexpr double a3[2]   = {3.0/40, 9.0/40};
    static constexpr double a4[3]   = {44.0/45, -56.0/15, 32.0/9};
    static constexpr double a5[4]   = {19372.0/6561, -25360.0/2187, 64448.0/6561, -212.0/729};
    static constexpr double a6[5]   = {9017.0/3168, -355.0/33, 46732.0/5247, 49.0/176, -5103.0/18656};
    static constexpr double b[7]    = {35.0/384, 0.0, 500.0/1113, 125.0/192, -2187.0/6784, 11.0/84, 0.0};
    static constexpr double bhat[7] = {5179.0/57600, 0.0, 7571.0/16695, 393.0/640,
                                       -92097.0/339200, 187.0/2100, 1.0/40};
    // clang-format on
};

inline State axpy(const State& y, double h, const State& k) {
    return {y[0] + h * k[0], y[1] + h * k[1]};
}

// One Dopri5 step; returns the 5th-order solution and the embedded error
// estimate relative to the 4th-order solution.
inline void dopri5_step(const DriveFn& drive, double tau, double h, const State& y,
                        State& y5, double& err_norm, double tolerance, double sign = 1.0) {
    std::array<State, 7> k;
    k[0] = rhs(drive, tau, y, sign);
    k[1] = rhs(drive, tau + Dopri5::c[1] * h, axpy(y, h * Dopri5::a2[0], k[0]), sign);
    {
        State t = y;
        t = axpy(t, h * Dopri5::a3[0], k[0]);
        t = axpy(t, h * Dopri5::a3[1], k[1]);
        k[2] = rhs(drive, tau + Dopri5::c[2] * h, t, sign);
    }
    {
        State t = y;
        t = axpy(t, h * Dopri5::a4[0], k[0]);
        t = axpy(t, h * Dopri5::a4[1], k[1]);
        t = axpy(t, h * Dopri5::a4[2], k[2]);
        k[3] = rhs(drive, tau + Dopri5::c[3] * h, t, sign);
    }
    {
        State t = y;
        t = axpy(t, h * Dopri5::a5[0], k[0]);
        t = axpy(t, h * Dopri5::a5[1], k[1]);
        t = axpy(t, h * Dopri5::a5[2], k[2]);
        t = axpy(t, h * Dopri5::a5[3], k[3]);
        k[4] = rhs(drive, tau + Dopri5::c[4] * h, t, sign);
    }
    {
        State t = y;
        t = axpy(t, h * Dopri5::a6[0], k[0]);
        t = axpy(t, h * Dopri5::a6[1], k[1]);
        t = axpy(t, h * Dopri5::a6[2], k[2]);
        t = axpy(t, h * Dopri5::a6[3], k[3]);
        t = axpy(t, h * Dopri5::a6[4], k[4]);
        k[5] = rhs(drive, tau + Dopri5::c[5] * h, t, sign);
    }
    y5 = y;
    for (int i = 0; i < 6; ++i)
        y5 = axpy(y5, h * Dopri5::b[i], k[i]);
    k[6] = rhs(drive, tau + h, y5, sign);

    State y4 = y;
    for (int i = 0; i < 7; ++i)
        y4 = axpy(y4, h * Dopri5::bhat[i], k[i]);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sc = tolerance * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
        const double d = std::abs(y5[i] - y4[i]);
        err += (d / sc) * (d / sc);
    }
    err_norm = std::sqrt(err / 2.0);
}

} // namespace detail

// Adaptive integration of the Schroedinger equation from psi(0) = |+>,
// reporting P(tau) = |c_minus|^2 at each requested sample point. Samples are
// hit exactly by clipping the step size.
inline OracleTrajectory evolve(const DriveFn& drive, double tau_end,
                               std::vector<double> sample_taus, double tolerance) {
    if (!(tau_end > 0.0))
        throw std::invalid_argument("evolve: tau_end must be > 0");
    if (!(tolerance >= 1e-13 && tolerance <= 1e-6))
        throw std::invalid_argument("evolve: tolerance must be in [1e-13, 1e-6]");
    std::sort(sample_taus.begin(), sample_taus.end());
    for (double s : sample_taus)
        if (s < 0.0 || s > tau_end)
            throw std::invalid_argument("evolve: sample points must lie in [0, tau_end]");

    OracleTrajectory traj;
    traj.tolerance = tolerance;

    detail::State y{{{1.0, 0.0}, {0.0, 0.0}}};
    double tau = 0.0;
    double h = std::min(0.01, tau_end);
    double prev_err = 1.0; // PI controller memory
    std::size_t next_sample = 0;

    // Slack of a few ulps: an accepted step clipped to a sample point can land
    // just short of it in floating point.
    auto record_samples_at = [&](double t) {
        const double slack = 32.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(t));
        while (next_sample < sample_taus.size() && sample_taus[next_sample] <= t + slack) {
            traj.taus.push_back(sample_taus[next_sample]);
            traj.probabilities.push_back(std::norm(y[1]));
            ++next_sample;
        }
    };

    record_samples_at(0.0); // samples at tau = 0 (and duplicates) use the initial state

    const double h_min = 1e-14 * std::max(1.0, tau_end);
    while (tau < tau_end) {
        double target = tau_end;
        if (next_sample < sample_taus.size())
            target = std::min(target, sample_taus[next_sample]);
        if (target <= tau) { // sample coincides with the current time
            record_samples_at(tau);
            continue;
        }
        h = std::min(h, target - tau);
        if (h < h_min)
            throw StepUnderflowError(tau);

        detail::State y_new;
        double err;
        detail::dopri5_step(drive, tau, h, y, y_new, err, tolerance);
        ++traj.steps_taken;
        if (err <= 1.0) {
            tau += h;
            y = y_new;
            traj.norm_drift =
                std::max(traj.norm_drift, std::abs(std::norm(y[0]) + std::norm(y[1]) - 1.0));
            record_samples_at(tau);
            // PI step control (orders 5/4)
            double fac = 0.9 * std::pow(err + 1e-300, -0.7 / 5.0) * std::pow(prev_err, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 5.0);
            h *= fac;
            prev_err = std::max(err, 1e-4);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
        }
    }
    record_samples_at(tau_end);
    return traj;
}

// Fixed-step classic RK4, used for convergence-order measurements.
inline QubitState evolve_fixed_step(const DriveFn& drive, double tau_end, long n_steps) {
    if (!(tau_end > 0.0) || n_steps < 1)
        throw std::invalid_argument("evolve_fixed_step: bad arguments");
    detail::State y{{{1.0, 0.0}, {0.0, 0.0}}};
    const double h = tau_end / static_cast<double>(n_steps);
    for (long i = 0; i < n_steps; ++i) {
        const double tau = static_cast<double>(i) * h;
        const auto k1 = detail::rhs(drive, tau, y, 1.0);
        const auto k2 = detail::rhs(drive, tau + 0.5 * h, detail::axpy(y, 0.5 * h, k1), 1.0);
        const auto k3 = detail::rhs(drive, tau + 0.5 * h, detail::axpy(y, 0.5 * h, k2), 1.0);
        const auto k4 = detail::rhs(drive, tau + h, detail::axpy(y, h, k3), 1.0);
        for (int j = 0; j < 2; ++j)
            y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return QubitState{y[0], y[1]};
}

// Adaptive propagation of an arbitrary initial state; reverse = true uses the
// negated generator (undoes a forward run of the same time-independent drive).
inline QubitState propagate(const DriveFn& drive, const QubitState& initial, double tau_end,
                            double tolerance, bool reverse = false) {
    if (!(tau_end > 0.0))
        throw std::invalid_argument("propagate: tau_end must be > 0");
    if (!(tolerance >= 1e-13 && tolerance <= 1e-6))
        throw std::invalid_argument("propagate: tolerance must be in [1e-13, 1e-6]");
    const double sign = reverse ? -1.0 : 1.0;
    detail::State y{{initial.c_plus, initial.c_minus}};
    double tau = 0.0;
    double h = std::min(0.01, tau_end);
    double prev_err = 1.0;
    const double h_min = 1e-14 * std::max(1.0, tau_end);
    while (tau < tau_end) {
        h = std::min(h, tau_end - tau);
        if (h < h_min)
            throw StepUnderflowError(tau);
        detail::State y_new;
        double err;
        detail::dopri5_step(drive, tau, h, y, y_new, err, tolerance, sign);
        if (err <= 1.0) {
            tau += h;
            y = y_new;
            double fac = 0.9 * std::pow(err + 1e-300, -0.7 / 5.0) * std::pow(prev_err, 0.4 / 5.0);
            h *= std::clamp(fac, 0.2, 5.0);
            prev_err = std::max(err, 1e-4);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
        }
    }
    return QubitState{y[0], y[1]};
}

// Integrates the synthesized drive and compares the oracle probabilities
// against the closed form on a uniform sample grid.
inline VerificationReport verify_closed_form(const PulseShape& shape, double tau_end,
                                             int n_samples, double tolerance) {
    if (n_samples < 2)
        throw std::invalid_argument("verify_closed_form: need at least 2 samples");
    std::vector<double> samples(n_samples);
    for (int i = 0; i < n_samples; ++i)
        samples[i] = tau_end * static_cast<double>(i) / (n_samples - 1);

    const DriveFn drive = [&shape](double tau) {
        return synthesize_upsilon(shape, tau).upsilon_over_omega;
    };
    const OracleTrajectory traj = evolve(drive, tau_end, samples, tolerance);

    VerificationReport rep;
    rep.pointwise.reserve(samples.size());
    for (std::size_t i = 0; i < traj.taus.size(); ++i) {
        PointwiseComparison c;
        c.tau = traj.taus[i];
        c.closed_form_p = probability_at(shape, c.tau).p_plus_to_minus;
        c.oracle_p = traj.probabilities[i];
        c.diff = std::abs(c.closed_form_p - c.oracle_p);
        if (c.diff > rep.max_abs_error) {
            rep.max_abs_error = c.diff;
            rep.tau_of_max = c.tau;
        }
        rep.pointwise.push_back(c);
    }
    return rep;
}

namespace detail {

// Polynomial extrapolation to x = 0 through (x_i, p_i), Neville's scheme.
inline double neville_at_zero(const std::vector<double>& x, const std::vector<double>& p) {
    std::vector<double> t = p;
    const std::size_t n = x.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            t[i] = t[i + 1] + (t[i + 1] - t[i]) * x[i + m] / (x[i] - x[i + m]);
    return t[0];
}

} // namespace detail

// Estimates P(inf) by sampling the closed-form probability at geometrically
// increasing tau and Richardson-extrapolating in 1/tau. Power-law approach
// converges after the 1/tau and 1/tau^2 terms cancel; Gaussian approach is
// already flat on the sample tail. Constant drives never settle and trip the
// step cap.
inline double estimate_infinite_time_limit(const PulseShape& shape, double tolerance) {
    if (!(tolerance > 0.0))
        throw std::invalid_argument("estimate_infinite_time_limit: tolerance must be > 0");
    const double tau0 = 1e4;
    const int max_doublings = 40;
    std::vector<double> xs, ps; // most recent 3 nodes, x = 1/tau
    double prev_extrap = 0.0;
    bool have_prev = false;
    int agree = 0;
    for (int k = 0; k <= max_doublings; ++k) {
        const double tau = tau0 * std::ldexp(1.0, k);
        const double p = probability_at(shape, tau).p_plus_to_minus;
        xs.push_back(1.0 / tau);
        ps.push_back(p);
        if (xs.size() > 3) {
            xs.erase(xs.begin());
            ps.erase(ps.begin());
        }
        if (xs.size() == 3) {
            const double extrap = detail::neville_at_zero(xs, ps);
            if (have_prev && std::abs(extrap - prev_extrap) < tolerance) {
                if (++agree >= 2)
                    return extrap;
            } else {
                agree = 0;
            }
            prev_extrap = extrap;
            have_prev = true;
        }
    }
    throw NonConvergenceError(
        "estimate_infinite_time_limit: no convergence after step cap; drive is "
        "outside the asymptotic class (e.g. constant drive)");
}

} // namespace qdrive
