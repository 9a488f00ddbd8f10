#include "fsw/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

namespace fsw {

namespace {

// multi-indices of the box {-cutoff..cutoff}^nu, lexicographic
std::vector<std::vector<int>> frequency_box(int nu, int cutoff) {
    std::vector<std::vector<int>> box;
    std::vector<int> current(static_cast<size_t>(nu), -cutoff);
    while (true) {
        box.push_back(current);
        int axis = nu - 1;
        while (axis >= 0) {
            if (++current[static_cast<size_t>(axis)] <= cutoff) break;
            current[static_cast<size_t>(axis)] = -cutoff;
            --axis;
        }
        if (axis < 0) break;
    }
    return box;
}

} // namespace

KernelSplit kernel_split(const KernelSymbol& k, int cutoff, const TorusGrid& grid) {
    if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
    if (cutoff >= grid.points_per_dim / 2)
        throw std::invalid_argument("cutoff " + std::to_string(cutoff) +
                                    " is beyond the grid resolution N/2");

    const int nu = k.nu;
    const int n = k.n;
    TorusGrid joint = make_grid(2 * nu, grid.points_per_dim);
    std::vector<Eigen::MatrixXcd> samples(static_cast<size_t>(joint.node_count()));
    for (std::int64_t flat = 0; flat < joint.node_count(); ++flat) {
        Eigen::VectorXd xy = joint.node(flat);
        samples[static_cast<size_t>(flat)] = k.eval(xy.head(nu), xy.tail(nu));
    }
    FourierTable table = fourier_analyze(samples, joint);

    // Coefficient pairing C[(p,a),(q,b)] = M_{p,-q}[a,b] is Hermitian exactly
    // when the kernel satisfies K^*(x,y) = K(y,x); its eigendecomposition
    // yields real couplings and the separable factors.
    std::vector<std::vector<int>> box = frequency_box(nu, cutoff);
    const int b = static_cast<int>(box.size());
    Eigen::MatrixXcd c(b * n, b * n);
    std::vector<int> joint_freq(static_cast<size_t>(2 * nu));
    for (int pi = 0; pi < b; ++pi) {
        for (int qi = 0; qi < b; ++qi) {
            for (int axis = 0; axis < nu; ++axis) {
                joint_freq[static_cast<size_t>(axis)] = box[static_cast<size_t>(pi)][static_cast<size_t>(axis)];
                joint_freq[static_cast<size_t>(nu + axis)] =
                    -box[static_cast<size_t>(qi)][static_cast<size_t>(axis)];
            }
            std::int64_t idx = table.index_of(joint_freq);
            c.block(n * pi, n * qi, n, n) = table.coef[static_cast<size_t>(idx)];
        }
    }
    c = 0.5 * (c + c.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
    double tau_peak = 0.0;
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
        tau_peak = std::max(tau_peak, std::abs(es.eigenvalues()[j]));
    // trim relative to the whole kernel's coefficient scale, not just the
    // box: a box filled with DFT rounding noise must come out empty
    const double keep_above = 1e-13 * std::max({tau_peak, table.max_abs(), 1e-300});

    std::vector<SeparableTerm> terms;
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
        double tau = es.eigenvalues()[j];
        if (std::abs(tau) <= keep_above) continue;
        Eigen::VectorXcd w = es.eigenvectors().col(j);
        SeparableTerm term;
        term.coupling = tau;
        term.label = "tau_" + std::to_string(terms.size());
        term.factor = [w, box, n](const Eigen::VectorXd& x) {
            Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
            for (size_t pi = 0; pi < box.size(); ++pi) {
                double phase = 0.0;
                for (int axis = 0; axis < static_cast<int>(x.size()); ++axis)
                    phase += box[pi][static_cast<size_t>(axis)] * x[axis];
                std::complex<double> e = std::polar(1.0, phase);
                out += e * w.segment(n * static_cast<Eigen::Index>(pi), n);
            }
            return out;
        };
        terms.push_back(std::move(term));
    }

    KernelSplit split;
    split.cutoff = cutoff;
    split.rank = static_cast<int>(terms.size());
    split.k2 = kernel_from_terms(n, nu, std::move(terms), k.name + "-low");

    KernelSymbol k1;
    k1.n = n;
    k1.nu = nu;
    k1.name = k.name + "-rest";
    auto full = k.eval;
    auto low = split.k2.eval;
    k1.eval = [full, low](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return Eigen::MatrixXcd(full(x, y) - low(x, y));
    };
    split.k1 = std::move(k1);

    split.k1_symmetry_residue = kernel_symmetry_residue(split.k1, grid);
    split.k2_symmetry_residue = kernel_symmetry_residue(split.k2, grid);
    return split;
}

WeightedL2Report weighted_l2_diagnostic(const MatrixSymbol& u, double z0,
                                        const KernelSymbol& k1,
                                        const std::vector<int>& resolutions) {
    if (resolutions.size() < 2)
        throw std::invalid_argument("need at least two resolutions for a trend");

    WeightedL2Report report;
    report.resolutions = resolutions;
    for (int res : resolutions) {
        TorusGrid grid = make_grid(u.nu, res);
        const std::int64_t m = grid.node_count();
        std::vector<Eigen::VectorXd> nodes(static_cast<size_t>(m));
        for (std::int64_t i = 0; i < m; ++i) nodes[static_cast<size_t>(i)] = grid.node(i);

        std::vector<double> weight_x(static_cast<size_t>(m), 0.0);
        std::int64_t excluded = 0;
        for (std::int64_t i = 0; i < m; ++i) {
            double d = delta(u, nodes[static_cast<size_t>(i)], z0);
            if (std::abs(d) < 1e-12) {
                ++excluded;
                continue;
            }
            weight_x[static_cast<size_t>(i)] = 1.0 / (d * d);
        }
        if (excluded == m)
            throw std::runtime_error("all quadrature nodes excluded at resolution " +
                                     std::to_string(res));

        const double w2 = grid.weight() * grid.weight();
        double acc = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            if (weight_x[static_cast<size_t>(i)] == 0.0) continue;
            double row = 0.0;
            for (std::int64_t j = 0; j < m; ++j)
                row += k1.eval(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)])
                           .squaredNorm();
            acc += weight_x[static_cast<size_t>(i)] * row;
        }
        report.integral.push_back(w2 * acc);
        report.excluded.push_back(excluded);
    }

    const double last = report.integral.back();
    const double prev = report.integral[report.integral.size() - 2];
    double rel_change = std::abs(last - prev) / std::max(std::abs(last), 1e-300);
    if (rel_change < 1e-3) {
        report.verdict = "CONVERGENT";
        return report;
    }
    bool all_growing = true;
    for (size_t i = 1; i < report.integral.size(); ++i)
        all_growing = all_growing &&
                      report.integral[i] >= 1.5 * std::max(report.integral[i - 1], 1e-300);
    report.verdict = all_growing ? "DIVERGENT" : "UNRESOLVED";
    return report;
}

RankPerturbationReport rank_perturbation_experiment(const MatrixSymbol& u,
                                                    const KernelSymbol& k_base,
                                                    const KernelSymbol& k_pert,
                                                    const TorusGrid& grid,
                                                    const BandSet& bands, double margin) {
    if (!k_pert.separable)
        throw std::invalid_argument("perturbation kernel needs an explicit separable form");

    RankPerturbationReport report;
    report.rank = static_cast<int>(k_pert.separable->size());

    SpectralResult base = eig_outside(assemble(u, k_base, grid), bands, margin);
    SpectralResult pert =
        eig_outside(assemble(u, kernel_sum(k_base, k_pert), grid), bands, margin);

    report.counts_base = base.counts_per_gap;
    report.counts_perturbed = pert.counts_per_gap;
    report.delta.resize(report.counts_base.size());
    for (size_t g = 0; g < report.counts_base.size(); ++g) {
        report.delta[g] = report.counts_perturbed[g] - report.counts_base[g];
        report.max_abs_delta = std::max(report.max_abs_delta, std::abs(report.delta[g]));
    }
    report.bound_holds = report.max_abs_delta <= 2 * report.rank;
    return report;
}

KernelSymbol random_separable_kernel(int nu, int rank, int max_freq, double amplitude,
                                     std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<SeparableTerm> terms;
    terms.reserve(static_cast<size_t>(rank));
    for (int t = 0; t < rank; ++t) {
        std::vector<double> cos_amp(static_cast<size_t>(max_freq) + 1);
        std::vector<double> sin_amp(static_cast<size_t>(max_freq) + 1);
        for (int f = 0; f <= max_freq; ++f) {
            cos_amp[static_cast<size_t>(f)] = unit(rng);
            sin_amp[static_cast<size_t>(f)] = f == 0 ? 0.0 : unit(rng);
        }
        double c = unit(rng);
        c = (c < 0 ? -1.0 : 1.0) * (0.2 + 0.8 * std::abs(c)) * amplitude;

        SeparableTerm term;
        term.coupling = c;
        term.label = "rand_" + std::to_string(t);
        term.factor = [cos_amp, sin_amp](const Eigen::VectorXd& x) {
            double v = 0.0;
            for (size_t f = 0; f < cos_amp.size(); ++f)
                v += cos_amp[f] * std::cos(static_cast<double>(f) * x[0]) +
                     sin_amp[f] * std::sin(static_cast<double>(f) * x[0]);
            Eigen::VectorXcd out(1);
            out(0) = v;
            return out;
        };
        terms.push_back(std::move(term));
    }
    return kernel_from_terms(1, nu, std::move(terms), "random_separable");
}

} // namespace fsw
