#include "fsw/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace fsw {

namespace {

constexpr std::int64_t exact_diameter_cap = 4000;
constexpr std::int64_t max_level_nodes = 1L << 22;

// Largest torus distance within the component. Beyond the pair cap the
// per-axis circular extent (2 pi minus the largest angular gap, capped at
// pi) gives a bounding-box estimate instead.
double component_diameter(const std::vector<Eigen::VectorXd>& pts) {
    const std::int64_t count = static_cast<std::int64_t>(pts.size());
    if (count < 2) return 0.0;
    if (count <= exact_diameter_cap) {
        double best = 0.0;
        for (std::int64_t i = 0; i < count; ++i)
            for (std::int64_t j = i + 1; j < count; ++j)
                best = std::max(best, torus_distance(pts[static_cast<size_t>(i)],
                                                     pts[static_cast<size_t>(j)]));
        return best;
    }
    const int nu = static_cast<int>(pts.front().size());
    double sum_sq = 0.0;
    std::vector<double> coords(static_cast<size_t>(count));
    for (int axis = 0; axis < nu; ++axis) {
        for (std::int64_t i = 0; i < count; ++i)
            coords[static_cast<size_t>(i)] = pts[static_cast<size_t>(i)][axis];
        std::sort(coords.begin(), coords.end());
        double largest_gap = two_pi - (coords.back() - coords.front());
        for (size_t i = 1; i < coords.size(); ++i)
            largest_gap = std::max(largest_gap, coords[i] - coords[i - 1]);
        double extent = std::min(two_pi - largest_gap, pi_v);
        sum_sq += extent * extent;
    }
    return std::sqrt(sum_sq);
}

std::vector<Component> level_components(const ScalarField& phi, const TorusGrid& grid,
                                        double tol) {
    const std::int64_t total = grid.node_count();
    std::vector<double> value(static_cast<size_t>(total));
    for (std::int64_t flat = 0; flat < total; ++flat)
        value[static_cast<size_t>(flat)] = phi(grid.node(flat));

    // A node belongs to the candidate zero set when |phi| is below tol or
    // below the oscillation across its own cells; the latter catches zeros
    // that fall strictly between nodes.
    std::vector<char> marked(static_cast<size_t>(total), 0);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        double osc = 0.0;
        for (int axis = 0; axis < grid.nu; ++axis)
            for (int step : {-1, 1})
                osc = std::max(osc,
                               std::abs(value[static_cast<size_t>(flat)] -
                                        value[static_cast<size_t>(grid.neighbor(flat, axis, step))]));
        if (std::abs(value[static_cast<size_t>(flat)]) <= std::max(tol, osc))
            marked[static_cast<size_t>(flat)] = 1;
    }

    std::vector<Component> components;
    std::vector<char> seen(static_cast<size_t>(total), 0);
    for (std::int64_t seed = 0; seed < total; ++seed) {
        if (!marked[static_cast<size_t>(seed)] || seen[static_cast<size_t>(seed)]) continue;
        std::vector<Eigen::VectorXd> pts;
        Component comp;
        comp.min_abs_phi = std::numeric_limits<double>::infinity();
        std::queue<std::int64_t> frontier;
        frontier.push(seed);
        seen[static_cast<size_t>(seed)] = 1;
        while (!frontier.empty()) {
            std::int64_t flat = frontier.front();
            frontier.pop();
            pts.push_back(grid.node(flat));
            double a = std::abs(value[static_cast<size_t>(flat)]);
            if (a < comp.min_abs_phi) {
                comp.min_abs_phi = a;
                comp.representative = pts.back();
            }
            for (int axis = 0; axis < grid.nu; ++axis) {
                for (int step : {-1, 1}) {
                    std::int64_t next = grid.neighbor(flat, axis, step);
                    if (marked[static_cast<size_t>(next)] && !seen[static_cast<size_t>(next)]) {
                        seen[static_cast<size_t>(next)] = 1;
                        frontier.push(next);
                    }
                }
            }
        }
        comp.node_count = static_cast<std::int64_t>(pts.size());
        comp.diameter = component_diameter(pts);
        components.push_back(std::move(comp));
    }
    return components;
}

double max_diameter(const std::vector<Component>& components) {
    double d = 0.0;
    for (const Component& c : components) d = std::max(d, c.diameter);
    return d;
}

} // namespace

ExtremalSetResult find_extremal_set(const ScalarField& phi, const TorusGrid& grid,
                                    double tol, int refine_limit) {
    if (tol <= 0.0) throw std::invalid_argument("tol must be positive");

    ExtremalSetResult result;
    int points = grid.points_per_dim;
    for (int round = 0; round <= refine_limit; ++round) {
        TorusGrid level_grid = make_grid(grid.nu, points);
        if (level_grid.node_count() > max_level_nodes) break;
        ExtremalLevel level;
        level.resolution = points;
        level.components = level_components(phi, level_grid, tol);
        result.levels.push_back(std::move(level));
        points *= 2;
    }
    if (result.levels.empty())
        throw std::invalid_argument("initial extremal-set grid exceeds the node cap");

    if (result.levels.size() < 2) {
        // single level: isolated only in the trivially tiny case
        const auto& comps = result.levels.back().components;
        double h = two_pi / result.levels.back().resolution;
        result.isolated = !comps.empty() && max_diameter(comps) <= 4.0 * h;
        return result;
    }

    const auto& last = result.levels.back();
    const auto& prev = result.levels[result.levels.size() - 2];
    bool counts_stable = last.components.size() == prev.components.size();
    double d_last = max_diameter(last.components);
    double d_prev = max_diameter(prev.components);
    double h_last = two_pi / last.resolution;
    bool shrinking = d_last <= std::max(0.7 * d_prev, 4.0 * h_last);
    result.isolated = counts_stable && !last.components.empty() && shrinking;
    return result;
}

ExtremalPoint estimate_multiplicity(const ScalarField& phi, const Eigen::VectorXd& x0,
                                    const std::vector<double>& radii,
                                    int samples_per_sphere) {
    if (radii.size() < 2)
        throw std::invalid_argument("need at least two radii for a slope");
    for (size_t i = 1; i < radii.size(); ++i)
        if (radii[i] >= radii[i - 1])
            throw std::invalid_argument("radii must be strictly decreasing");
    if (radii.front() >= pi_v / 2)
        throw std::invalid_argument("radii must stay below the injectivity scale pi/2");

    const int nu = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> directions = sphere_directions(nu, samples_per_sphere);
    const double phi0 = phi(x0);

    ExtremalPoint point;
    point.location = x0;
    point.radii_used = radii;

    std::vector<double> log_r, log_g;
    for (double r : radii) {
        double g = std::numeric_limits<double>::infinity();
        double peak = 0.0;
        Eigen::VectorXd best_dir = directions.front();
        for (const Eigen::VectorXd& d : directions) {
            double v = std::abs(phi(wrap_point(x0 + r * d)) - phi0);
            if (v < g) {
                g = v;
                best_dir = d;
            }
            peak = std::max(peak, v);
        }
        if (nu == 2) {
            // angular polish around the best direction; the min over the
            // sphere can sit in a narrow angular window when the zero is
            // anisotropic
            double theta0 = std::atan2(best_dir[1], best_dir[0]);
            double window = two_pi / static_cast<double>(directions.size());
            double theta = golden_section_min(
                [&](double t) {
                    Eigen::VectorXd d(2);
                    d << std::cos(t), std::sin(t);
                    return std::abs(phi(wrap_point(x0 + r * d)) - phi0);
                },
                theta0 - window, theta0 + window);
            Eigen::VectorXd d(2);
            d << std::cos(theta), std::sin(theta);
            g = std::min(g, std::abs(phi(wrap_point(x0 + r * d)) - phi0));
        }
        if (g == 0.0 || g <= 1e-13 * peak)
            throw NotIsolatedError("sphere minimum vanished at radius " + std::to_string(r));
        log_r.push_back(std::log(r));
        log_g.push_back(std::log(g));
    }

    point.fit = fit_line(log_r, log_g);
    point.m_hat = point.fit.slope;
    return point;
}

std::vector<MultiplicityReport> total_multiplicity(const MatrixSymbol& u,
                                                   const BandSet& bands,
                                                   const TorusGrid& grid, double tol) {
    GammaPoints gamma = gamma_points(bands);
    std::vector<double> radii;
    for (int j = 3; j <= 10; ++j) radii.push_back(std::pow(2.0, -j));

    std::vector<MultiplicityReport> reports;
    for (double z : gamma.values) {
        MultiplicityReport report;
        report.z = z;
        ScalarField phi = phi_z(u, z);
        ExtremalSetResult ess = find_extremal_set(phi, grid, tol, 2);

        const auto& comps = ess.final_components();
        report.component_count = static_cast<int>(comps.size());
        for (const Component& c : comps) report.component_diameters.push_back(c.diameter);

        if (!ess.isolated) {
            report.isolated = false;
            report.mu_z = std::numeric_limits<double>::infinity();
            reports.push_back(std::move(report));
            continue;
        }

        double h = two_pi / ess.levels.back().resolution;
        auto abs_phi = [&phi](const Eigen::VectorXd& x) { return std::abs(phi(x)); };
        try {
            double mu_z = 0.0;
            for (const Component& c : comps) {
                Eigen::VectorXd x0 = polish_minimum(abs_phi, c.representative, h);
                ExtremalPoint pt = estimate_multiplicity(phi, x0, radii, 64);
                mu_z += pt.m_hat;
                report.points.push_back(std::move(pt));
            }
            report.isolated = true;
            report.mu_z = mu_z;
        } catch (const NotIsolatedError&) {
            report.points.clear();
            report.isolated = false;
            report.mu_z = std::numeric_limits<double>::infinity();
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

double max_mu(const std::vector<MultiplicityReport>& reports) {
    double mu = 0.0;
    for (const MultiplicityReport& r : reports) mu = std::max(mu, r.mu_z);
    return mu;
}

CertificateVerdict finiteness_certificate(double mu, int nu,
                                          const SmoothnessEstimate& alpha) {
    CertificateVerdict verdict;
    verdict.mu = mu;
    verdict.alpha_hat = alpha.alpha_hat;
    verdict.threshold = 2.0 * mu - 0.5 * static_cast<double>(nu);

    if (!std::isfinite(mu)) {
        verdict.verdict = "INCONCLUSIVE";
        verdict.reason = "non-isolated extremal set";
        return verdict;
    }
    if (alpha.inconclusive) {
        verdict.verdict = "INCONCLUSIVE";
        verdict.reason = "smoothness estimate inconclusive (too few usable shells)";
        return verdict;
    }
    if (alpha.alpha_hat > verdict.threshold) {
        verdict.verdict = "PREDICTED-FINITE";
        return verdict;
    }
    verdict.verdict = "INCONCLUSIVE";
    verdict.reason = "smoothness index " + std::to_string(alpha.alpha_hat) +
                     " does not exceed the threshold " + std::to_string(verdict.threshold);
    return verdict;
}

} // namespace fsw
