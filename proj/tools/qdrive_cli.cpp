// Command-line front end: emit Upsilon(tau)/omega and P(tau) series as CSV,
// cross-check closed forms against the integration oracle, estimate
// infinite-time limits, and sweep parameters.
//
// Exit codes: 0 success, 1 config error, 2 admissibility violation,
//             3 verification failure, 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdrive/qdrive.hpp"

namespace {

constexpr const char* kToolVersion = "qdrive 1.0.0";

enum ExitCode {
    kOk = 0,
    kConfigError = 1,
    kAdmissibilityError = 2,
    kVerificationFailure = 3,
    kIoError = 4,
};

struct RunConfig {
    std::string family = "rational-power";
    double phi_inf = 2.0 * std::sqrt(2.0) / 3.0;
    double gamma = 1.0;
    double eta = 2.0;
    double beta = 0.0;
    double upsilon = 1.0; // Rabi family: constant Upsilon/omega
    double tau_min = 1e-2; // log grids only
    double tau_max = 100.0;
    int points = 0;        // 0: per-grid default (linear 2001, log 50/decade)
    std::string grid = "linear";
    double tolerance = 1e-10;
    double threshold = 1e-6; // verify: acceptable max |closed form - oracle|
    std::string out;         // empty: stdout
    // sweep
    std::string sweep_param = "phi_inf";
    double sweep_min = 0.0;
    double sweep_max = 0.9;
    int sweep_steps = 10;
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

qdrive::PulseShape make_shape(const RunConfig& cfg) {
    using qdrive::PulseShape;
    if (cfg.family == "rational-power")
        return PulseShape::rational_power(cfg.phi_inf, cfg.gamma, cfg.eta);
    if (cfg.family == "essential-singularity")
        return PulseShape::essential_singularity(cfg.phi_inf, cfg.gamma);
    if (cfg.family == "gaussian-modulated")
        return PulseShape::gaussian_modulated(cfg.phi_inf, cfg.gamma, cfg.beta);
    if (cfg.family == "rabi")
        return PulseShape::rabi(cfg.upsilon);
    throw std::invalid_argument("unknown family: " + cfg.family);
}

std::vector<double> make_grid(const RunConfig& cfg) {
    if (!(cfg.tau_max > 0.0))
        throw std::invalid_argument("tau-max must be > 0");
    std::vector<double> taus;
    if (cfg.grid == "linear") {
        const int n = cfg.points > 0 ? cfg.points : 2001;
        if (n < 2)
            throw std::invalid_argument("points must be >= 2");
        taus.reserve(n);
        for (int i = 0; i < n; ++i)
            taus.push_back(cfg.tau_max * static_cast<double>(i) / (n - 1));
    } else if (cfg.grid == "log") {
        if (!(cfg.tau_min > 0.0 && cfg.tau_min < cfg.tau_max))
            throw std::invalid_argument("log grid needs 0 < tau-min < tau-max");
        const double decades = std::log10(cfg.tau_max / cfg.tau_min);
        const int n = cfg.points > 0 ? cfg.points
                                     : std::max(2, static_cast<int>(std::ceil(50.0 * decades)) + 1);
        taus.reserve(n);
        for (int i = 0; i < n; ++i)
            taus.push_back(cfg.tau_min *
                           std::pow(cfg.tau_max / cfg.tau_min, static_cast<double>(i) / (n - 1)));
    } else {
        throw std::invalid_argument("grid must be 'linear' or 'log'");
    }
    return taus;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw std::ios_base::failure("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (file_.is_open() && !file_)
            throw std::ios_base::failure("write failure");
    }

private:
    std::ofstream file_;
};

void write_metadata(std::ostream& os, const RunConfig& cfg, const std::string& command) {
    os << "# " << kToolVersion << "\n";
    os << "# command=" << command << "\n";
    os << "# family=" << cfg.family << " phi_inf=" << fmt(cfg.phi_inf)
       << " gamma=" << fmt(cfg.gamma) << " eta=" << fmt(cfg.eta) << " beta=" << fmt(cfg.beta)
       << " upsilon=" << fmt(cfg.upsilon) << "\n";
}

int run_synthesize(const RunConfig& cfg) {
    const auto shape = make_shape(cfg);
    const auto taus = make_grid(cfg);
    Output out(cfg.out);
    write_metadata(out.stream(), cfg, "synthesize");
    out.stream() << "tau,upsilon_over_omega,denominator\n";
    for (double tau : taus) {
        const auto s = qdrive::synthesize_upsilon(shape, tau);
        out.stream() << fmt(s.tau) << "," << fmt(s.upsilon_over_omega) << ","
                     << fmt(s.denominator) << "\n";
    }
    out.finish();
    return kOk;
}

int run_probability(const RunConfig& cfg) {
    const auto shape = make_shape(cfg);
    const auto taus = make_grid(cfg);
    Output out(cfg.out);
    write_metadata(out.stream(), cfg, "probability");
    out.stream() << "tau,probability\n";
    for (double tau : taus) {
        const auto p = qdrive::probability_at(shape, tau);
        out.stream() << fmt(p.tau) << "," << fmt(p.p_plus_to_minus) << "\n";
    }
    out.finish();
    return kOk;
}

int run_verify(const RunConfig& cfg) {
    const auto shape = make_shape(cfg);
    const int n = cfg.points > 0 ? cfg.points : 201;
    const auto report = qdrive::verify_closed_form(shape, cfg.tau_max, n, cfg.tolerance);
    if (!cfg.out.empty()) {
        Output out(cfg.out);
        write_metadata(out.stream(), cfg, "verify");
        out.stream() << "tau,closed_form_p,oracle_p,diff\n";
        for (const auto& c : report.pointwise)
            out.stream() << fmt(c.tau) << "," << fmt(c.closed_form_p) << "," << fmt(c.oracle_p)
                         << "," << fmt(c.diff) << "\n";
        out.finish();
    }
    std::cout << "max |P_closed - P_oracle| = " << fmt(report.max_abs_error)
              << " at tau = " << fmt(report.tau_of_max) << " (threshold " << fmt(cfg.threshold)
              << ")\n";
    if (report.max_abs_error > cfg.threshold) {
        std::cout << "verify: FAIL\n";
        return kVerificationFailure;
    }
    std::cout << "verify: PASS\n";
    return kOk;
}

int run_limit(const RunConfig& cfg) {
    const auto shape = make_shape(cfg);
    const double predicted =
        qdrive::asymptotic_probability(qdrive::upsilon_asymptote(cfg.phi_inf));
    const double estimated = qdrive::estimate_infinite_time_limit(shape, cfg.tolerance);
    std::cout << "extrapolated limit  = " << fmt(estimated) << "\n"
              << "closed-form limit   = " << fmt(predicted) << "\n"
              << "difference          = " << fmt(estimated - predicted) << "\n";
    return kOk;
}

int run_sweep(const RunConfig& cfg) {
    if (cfg.sweep_steps < 2)
        throw std::invalid_argument("sweep-steps must be >= 2");
    Output out(cfg.out);
    write_metadata(out.stream(), cfg, "sweep");
    out.stream() << "sweep=" << cfg.sweep_param << " min=" << fmt(cfg.sweep_min)
                 << " max=" << fmt(cfg.sweep_max) << "\n";
    out.stream() << cfg.sweep_param << ",p_at_tau_max,predicted_limit,diff\n";
    for (int i = 0; i < cfg.sweep_steps; ++i) {
        RunConfig point = cfg;
        const double v = cfg.sweep_min + (cfg.sweep_max - cfg.sweep_min) *
                                             static_cast<double>(i) / (cfg.sweep_steps - 1);
        if (cfg.sweep_param == "phi_inf")
            point.phi_inf = v;
        else if (cfg.sweep_param == "gamma")
            point.gamma = v;
        else if (cfg.sweep_param == "eta")
            point.eta = v;
        else if (cfg.sweep_param == "beta")
            point.beta = v;
        else if (cfg.sweep_param == "upsilon")
            point.upsilon = v;
        else
            throw std::invalid_argument("unknown sweep-param: " + cfg.sweep_param);
        const auto shape = make_shape(point);
        const double p = qdrive::probability_at(shape, point.tau_max).p_plus_to_minus;
        const double predicted =
            qdrive::asymptotic_probability(qdrive::upsilon_asymptote(point.phi_inf));
        out.stream() << fmt(v) << "," << fmt(p) << "," << fmt(predicted) << ","
                     << fmt(p - predicted) << "\n";
    }
    out.finish();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reverse-engineered two-level-system pulse toolkit"};
    app.fallthrough(true);
    app.set_config("--config", "", "Flat key=value config file; flags override");

    RunConfig cfg;
    app.add_option("--family", cfg.family,
                   "rational-power | essential-singularity | gaussian-modulated | rabi");
    app.add_option("--phi-inf", cfg.phi_inf, "Asymptote Phi(inf), in [0,1)");
    app.add_option("--gamma", cfg.gamma, "Shape parameter gamma");
    app.add_option("--eta", cfg.eta, "Rational-power exponent eta");
    app.add_option("--beta", cfg.beta, "Gaussian-modulated modulation beta");
    app.add_option("--upsilon", cfg.upsilon, "Rabi family: constant Upsilon/omega");
    app.add_option("--tau-min", cfg.tau_min, "Grid start (log grids)");
    app.add_option("--tau-max", cfg.tau_max, "Grid end (dimensionless tau)");
    app.add_option("--points", cfg.points, "Grid points (0 = per-grid default)");
    app.add_option("--grid", cfg.grid, "linear | log");
    app.add_option("--tolerance", cfg.tolerance, "Integrator / extrapolation tolerance");
    app.add_option("--threshold", cfg.threshold, "verify: acceptance threshold");
    app.add_option("--out", cfg.out, "Output file (default stdout)");
    app.add_option("--sweep-param", cfg.sweep_param, "phi_inf | gamma | eta | beta | upsilon");
    app.add_option("--sweep-min", cfg.sweep_min, "Sweep range start");
    app.add_option("--sweep-max", cfg.sweep_max, "Sweep range end");
    app.add_option("--sweep-steps", cfg.sweep_steps, "Sweep point count");

    auto* synth = app.add_subcommand("synthesize", "Emit Upsilon(tau)/omega series as CSV");
    auto* prob = app.add_subcommand("probability", "Emit P(tau) series as CSV");
    auto* verify = app.add_subcommand("verify", "Closed form vs. integration oracle");
    auto* limit = app.add_subcommand("limit", "Infinite-time probability limit");
    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (synth->parsed())
            return run_synthesize(cfg);
        if (prob->parsed())
            return run_probability(cfg);
        if (verify->parsed())
            return run_verify(cfg);
        if (limit->parsed())
            return run_limit(cfg);
        if (sweep->parsed())
            return run_sweep(cfg);
        return kConfigError;
    } catch (const qdrive::NearSingularError& e) {
        std::cerr << "admissibility violation: " << e.what() << "\n";
        return kAdmissibilityError;
    } catch (const qdrive::DegeneratePhaseError& e) {
        std::cerr << "admissibility violation: " << e.what() << "\n";
        return kAdmissibilityError;
    } catch (const qdrive::NonConvergenceError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kVerificationFailure;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
}
