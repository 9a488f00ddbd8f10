#include "fsw/example.hpp"

#include <cmath>
#include <stdexcept>

#include "fsw/numerics.hpp"
#include "fsw/torus.hpp"

namespace fsw {

Convention parse_convention(const std::string& name) {
    if (name == "calibrated") return Convention::Calibrated;
    if (name == "lebesgue-negated") return Convention::LebesgueNegated;
    if (name == "lebesgue-normalized") return Convention::LebesgueNormalized;
    throw std::invalid_argument("unknown convention tag: " + name);
}

std::string convention_name(Convention convention) {
    switch (convention) {
        case Convention::Calibrated: return "calibrated";
        case Convention::LebesgueNegated: return "lebesgue-negated";
        case Convention::LebesgueNormalized: return "lebesgue-normalized";
    }
    throw std::logic_error("unreachable");
}

namespace {

double convention_beta(Convention convention) {
    switch (convention) {
        case Convention::Calibrated: return 1.0;
        case Convention::LebesgueNegated: return pi_v;
        case Convention::LebesgueNormalized: return 0.5;
    }
    throw std::logic_error("unreachable");
}

} // namespace

double c_coefficient(int k) {
    if (k < 1) throw std::invalid_argument("mode index must be >= 1");
    double a = 1.0 + std::exp(-k);
    return std::sqrt(a * a - 1.0) / two_pi;
}

double c_coefficient_quadrature(int k) {
    if (k < 1) throw std::invalid_argument("mode index must be >= 1");
    const double eps = std::exp(-k);
    // the integrand's complex poles sit at distance ~ sqrt(2 eps) from the
    // real axis; the trapezoid rule needs ~ 30 / that many nodes for 1e-12
    const double pole_distance = std::sqrt(2.0 * eps);
    const std::int64_t n =
        std::max<std::int64_t>(4096, static_cast<std::int64_t>(std::ceil(30.0 / pole_distance)));
    double sum = 0.0;
    const double h = two_pi / static_cast<double>(n);
    for (std::int64_t j = 0; j < n; ++j) {
        double t = h * static_cast<double>(j);
        sum += 1.0 / (std::cos(t) + 1.0 + eps);
    }
    return 1.0 / (sum * h);
}

ExampleModel build_example(int k_max, Convention convention) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");

    ExampleConfig config;
    config.k_max = k_max;
    config.convention = convention;
    config.beta = convention_beta(convention);
    config.kernel_scale = -config.beta / pi_v;

    for (int k = 1; k <= k_max; ++k) {
        double closed = c_coefficient(k);
        double quad = c_coefficient_quadrature(k);
        double err = std::abs(closed - quad);
        config.c_cross_check_error = std::max(config.c_cross_check_error, err);
        if (err > 1e-10)
            throw std::runtime_error("coupling c_" + std::to_string(k) +
                                     " cross-check failed: closed form " +
                                     std::to_string(closed) + " vs quadrature " +
                                     std::to_string(quad));
        config.c.push_back(closed);
    }

    std::vector<SeparableTerm> terms;
    terms.reserve(static_cast<size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        SeparableTerm term;
        term.coupling = config.kernel_scale * config.c[static_cast<size_t>(k - 1)];
        term.label = "mode_" + std::to_string(k);
        term.factor = [k](const Eigen::VectorXd& x) {
            Eigen::VectorXcd v(1);
            v(0) = std::cos(k * x[1]);
            return v;
        };
        terms.push_back(std::move(term));
    }

    ExampleModel model;
    model.u = mat_cos_x1(2);
    model.k = kernel_from_terms(1, 2, std::move(terms), "accumulation_example");
    model.config = std::move(config);
    return model;
}

KernelSymbol example_kernel(int k_max, const std::string& convention) {
    return build_example(k_max, parse_convention(convention)).k;
}

std::optional<double> solve_mode_dispersion(double beta, double c, double xtol) {
    // F(z) = beta c 2pi / sqrt((z-1)(z+1)) - 1 on z < -1; F -> +inf at the
    // edge and -> -1 far below, so the unique root sits in
    // (-1 - 2pi beta c, -1). The factored form (z-1)(z+1) avoids the
    // cancellation in z^2 - 1 next to the edge.
    const double s = two_pi * beta * c;
    if (!(s > 0.0)) return std::nullopt;
    auto f = [beta, c](double z) {
        return two_pi * beta * c / std::sqrt((z - 1.0) * (z + 1.0)) - 1.0;
    };
    double lo = -1.0 - s - 1.0;
    double hi = -1.0 - 1e-13;
    if (f(lo) >= 0.0 || f(hi) <= 0.0) return std::nullopt;
    return bisect_root(f, lo, hi, xtol);
}

std::vector<double> dispersion_roots(const ExampleConfig& config) {
    std::vector<double> roots;
    roots.reserve(config.c.size());
    for (size_t i = 0; i < config.c.size(); ++i) {
        std::optional<double> z = solve_mode_dispersion(config.beta, config.c[i]);
        if (!z)
            throw std::runtime_error("mode " + std::to_string(i + 1) +
                                     " has no dispersion root under convention " +
                                     convention_name(config.convention));
        roots.push_back(*z);
    }
    return roots;
}

AccumulationVerdict verify_accumulation(const std::vector<double>& z_list,
                                        const BandSet& bands) {
    AccumulationVerdict verdict;
    if (bands.bands.empty()) {
        verdict.message = "no bands";
        return verdict;
    }
    verdict.edge = bands.bands.front().lo;
    if (z_list.size() < 3) {
        verdict.message = "need at least 3 values";
        return verdict;
    }
    for (size_t i = 0; i < z_list.size(); ++i) {
        if (z_list[i] >= verdict.edge) {
            verdict.message = "value " + std::to_string(z_list[i]) + " not below the edge";
            return verdict;
        }
        if (i > 0 && z_list[i] <= z_list[i - 1]) {
            verdict.message = "sequence not strictly increasing toward the edge";
            return verdict;
        }
    }
    std::vector<double> idx, log_dist;
    for (size_t i = 0; i < z_list.size(); ++i) {
        idx.push_back(static_cast<double>(i + 1));
        log_dist.push_back(std::log(verdict.edge - z_list[i]));
    }
    LineFit fit = fit_line(idx, log_dist);
    verdict.slope = fit.slope;
    if (std::abs(fit.slope + 1.0) > 0.15) {
        verdict.message = "log-distance slope " + std::to_string(fit.slope) +
                          " outside -1 +/- 0.15";
        return verdict;
    }
    verdict.pass = true;
    return verdict;
}

Convention calibrate_convention(double tol) {
    const double target = -1.0 - std::exp(-1.0);
    for (Convention convention : {Convention::Calibrated, Convention::LebesgueNegated,
                                  Convention::LebesgueNormalized}) {
        std::optional<double> z =
            solve_mode_dispersion(convention_beta(convention), c_coefficient(1));
        if (z && std::abs(*z - target) <= tol) return convention;
    }
    throw std::runtime_error("no convention reproduces the mode-1 value -1 - e^{-1}");
}

} // namespace fsw
