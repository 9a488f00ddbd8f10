#include "fsw/symbols.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fsw/example.hpp"
#include "fsw/numerics.hpp"

namespace fsw {

Eigen::MatrixXcd KernelSymbol::eval_separable(const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& y) const {
    if (!separable)
        throw std::logic_error("kernel '" + name + "' has no separable representation");
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& term : *separable)
        acc += term.coupling * (term.factor(x) * term.factor(y).adjoint());
    return acc;
}

double hermitian_deviation(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd symbol_eigenvalues(const MatrixSymbol& u, const Eigen::VectorXd& x,
                                   double herm_tol) {
    Eigen::MatrixXcd m = u.eval(x);
    double dev = hermitian_deviation(m);
    if (dev > herm_tol)
        throw std::invalid_argument("symbol '" + u.name + "' deviates from Hermitian by " +
                                 std::to_string(dev));
    Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues(); // ascending
}

SymmetryReport validate_symmetry(const MatrixSymbol& u, const KernelSymbol& k,
                                 const TorusGrid& grid, double tol) {
    if (u.nu != grid.nu || k.nu != grid.nu)
        throw std::invalid_argument("symbol dimension does not match grid");

    const std::int64_t m = grid.node_count();
    std::vector<Eigen::VectorXd> nodes(static_cast<size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) nodes[static_cast<size_t>(i)] = grid.node(i);

    SymmetryReport report;
    report.tol = tol;
    for (std::int64_t i = 0; i < m; ++i)
        report.u_max_deviation =
            std::max(report.u_max_deviation, hermitian_deviation(u.eval(nodes[static_cast<size_t>(i)])));

    // K(x,y)^* = K(y,x): the deviation of the pair (i,j) equals that of (j,i)
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            Eigen::MatrixXcd kij = k.eval(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)]);
            Eigen::MatrixXcd kji = k.eval(nodes[static_cast<size_t>(j)], nodes[static_cast<size_t>(i)]);
            double dev = (kij - kji.adjoint()).cwiseAbs().maxCoeff();
            report.k_max_deviation = std::max(report.k_max_deviation, dev);
        }
    }
    report.pass = report.u_max_deviation <= tol && report.k_max_deviation <= tol;
    return report;
}

double kernel_symmetry_residue(const KernelSymbol& k, const TorusGrid& grid) {
    if (k.nu != grid.nu)
        throw std::invalid_argument("kernel dimension does not match grid");
    const std::int64_t m = grid.node_count();
    std::vector<Eigen::VectorXd> nodes(static_cast<size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) nodes[static_cast<size_t>(i)] = grid.node(i);
    double worst = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            Eigen::MatrixXcd kij = k.eval(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)]);
            Eigen::MatrixXcd kji = k.eval(nodes[static_cast<size_t>(j)], nodes[static_cast<size_t>(i)]);
            worst = std::max(worst, (kij - kji.adjoint()).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

SmoothnessEstimate smoothness_index(const KernelSymbol& k, const TorusGrid& grid) {
    if (k.nu != grid.nu)
        throw std::invalid_argument("kernel dimension does not match grid");
    if (grid.points_per_dim < 16)
        throw std::invalid_argument("smoothness_index needs at least 16 points per axis");

    const int dims = 2 * grid.nu;
    TorusGrid joint = make_grid(dims, grid.points_per_dim);
    const std::int64_t total = joint.node_count();

    std::vector<Eigen::MatrixXcd> samples(static_cast<size_t>(total));
    Eigen::VectorXd x(grid.nu), y(grid.nu);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        Eigen::VectorXd xy = joint.node(flat);
        x = xy.head(grid.nu);
        y = xy.tail(grid.nu);
        samples[static_cast<size_t>(flat)] = k.eval(x, y);
    }
    FourierTable table = fourier_analyze(samples, joint);

    // Shell s collects coefficients with round(|p|) == s; shells up to
    // N/2 - 1 are completely contained in the resolved frequency box.
    const int s_max = grid.points_per_dim / 2 - 1;
    std::vector<double> shell_peak(static_cast<size_t>(s_max) + 1, 0.0);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::vector<int> p = table.freq(flat);
        double norm2 = 0.0;
        for (int c : p) norm2 += static_cast<double>(c) * c;
        int s = static_cast<int>(std::lround(std::sqrt(norm2)));
        if (s < 1 || s > s_max) continue;
        double mag = table.coef[static_cast<size_t>(flat)].norm(); // Frobenius
        shell_peak[static_cast<size_t>(s)] = std::max(shell_peak[static_cast<size_t>(s)], mag);
    }

    double global_peak = 0.0;
    for (int s = 1; s <= s_max; ++s) global_peak = std::max(global_peak, shell_peak[static_cast<size_t>(s)]);
    const double dead_below = std::max(1e-13 * global_peak, 1e-300);

    int s_live = 0;
    for (int s = 1; s <= s_max; ++s)
        if (shell_peak[static_cast<size_t>(s)] > dead_below) s_live = s;

    SmoothnessEstimate est;
    est.shell_min = 1;
    est.shell_max = s_live;
    if (s_live < s_max) {
        // the coefficient tail is numerically zero: finitely many harmonics
        est.infinite = true;
        est.alpha_hat = std::numeric_limits<double>::infinity();
        return est;
    }

    std::vector<double> logs, logm;
    for (int s = 1; s <= s_live; ++s) {
        if (shell_peak[static_cast<size_t>(s)] <= dead_below) continue; // parity gaps
        logs.push_back(std::log(static_cast<double>(s)));
        logm.push_back(std::log(shell_peak[static_cast<size_t>(s)]));
    }
    if (logs.size() < 4) {
        est.inconclusive = true;
        return est;
    }
    LineFit fit = fit_line(logs, logm);
    est.slope = fit.slope;
    est.fit_quality = fit.rms_residual;
    est.alpha_hat = std::max(0.0, -fit.slope - static_cast<double>(dims));
    return est;
}

// ---- constructors -----------------------------------------------------------

MatrixSymbol matrix_from_fourier(FourierTable table, int nu, std::string name) {
    if (table.dims != nu)
        throw std::invalid_argument("matrix Fourier table dimension must equal nu");
    auto shared = std::make_shared<const FourierTable>(std::move(table));
    MatrixSymbol sym;
    sym.n = shared->n;
    sym.nu = nu;
    sym.name = std::move(name);
    sym.fourier = shared;
    sym.eval = [shared](const Eigen::VectorXd& x) { return shared->value_at(x); };
    return sym;
}

KernelSymbol kernel_from_fourier(FourierTable joint_table, int nu, std::string name) {
    if (joint_table.dims != 2 * nu)
        throw std::invalid_argument("kernel Fourier table must live on the joint torus (2 nu axes)");
    auto shared = std::make_shared<const FourierTable>(std::move(joint_table));
    KernelSymbol sym;
    sym.n = shared->n;
    sym.nu = nu;
    sym.name = std::move(name);
    sym.fourier = shared;
    sym.eval = [shared, nu](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        Eigen::VectorXd xy(2 * nu);
        xy.head(nu) = x;
        xy.tail(nu) = y;
        return shared->value_at(xy);
    };
    return sym;
}

KernelSymbol kernel_from_terms(int n, int nu, std::vector<SeparableTerm> terms,
                               std::string name) {
    auto shared = std::make_shared<const std::vector<SeparableTerm>>(std::move(terms));
    KernelSymbol sym;
    sym.n = n;
    sym.nu = nu;
    sym.name = std::move(name);
    sym.eval = [shared, n](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
        for (const auto& term : *shared)
            acc += term.coupling * (term.factor(x) * term.factor(y).adjoint());
        return acc;
    };
    sym.separable = *shared;
    return sym;
}

KernelSymbol kernel_sum(const KernelSymbol& a, const KernelSymbol& b, std::string name) {
    if (a.n != b.n || a.nu != b.nu)
        throw std::invalid_argument("kernel_sum needs matching block size and dimension");
    KernelSymbol sym;
    sym.n = a.n;
    sym.nu = a.nu;
    sym.name = name.empty() ? a.name + "+" + b.name : std::move(name);
    auto ea = a.eval;
    auto eb = b.eval;
    sym.eval = [ea, eb](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return Eigen::MatrixXcd(ea(x, y) + eb(x, y));
    };
    if (a.separable && b.separable) {
        std::vector<SeparableTerm> terms = *a.separable;
        terms.insert(terms.end(), b.separable->begin(), b.separable->end());
        sym.separable = std::move(terms);
    }
    return sym;
}

KernelSymbol kernel_scale(const KernelSymbol& k, double factor) {
    KernelSymbol sym;
    sym.n = k.n;
    sym.nu = k.nu;
    sym.name = k.name + "*scaled";
    auto ev = k.eval;
    sym.eval = [ev, factor](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return Eigen::MatrixXcd(factor * ev(x, y));
    };
    if (k.separable) {
        std::vector<SeparableTerm> terms = *k.separable;
        for (auto& term : terms) term.coupling *= factor;
        sym.separable = std::move(terms);
    }
    return sym;
}

// ---- builtin catalog --------------------------------------------------------

double BuiltinParams::get(const std::string& key, double fallback) const {
    auto it = scalars.find(key);
    return it == scalars.end() ? fallback : it->second;
}

MatrixSymbol mat_cos_x1(int nu) {
    MatrixSymbol sym;
    sym.n = 1;
    sym.nu = nu;
    sym.name = "cos_x1";
    sym.eval = [](const Eigen::VectorXd& x) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = std::cos(x[0]);
        return m;
    };
    return sym;
}

MatrixSymbol mat_diag_shifted_cos(int nu, double shift) {
    MatrixSymbol sym;
    sym.n = 2;
    sym.nu = nu;
    sym.name = "diag_shifted_cos";
    sym.eval = [shift](const Eigen::VectorXd& x) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        m(0, 0) = std::cos(x[0]);
        m(1, 1) = std::cos(x[0]) + shift;
        return m;
    };
    return sym;
}

MatrixSymbol mat_constant(int nu, double value) {
    MatrixSymbol sym;
    sym.n = 1;
    sym.nu = nu;
    sym.name = "constant";
    sym.eval = [value](const Eigen::VectorXd&) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = value;
        return m;
    };
    return sym;
}

KernelSymbol ker_zero(int nu) {
    return kernel_from_terms(1, nu, {}, "zero");
}

KernelSymbol ker_rank_one_const(int nu, double gamma) {
    SeparableTerm term;
    term.coupling = -gamma;
    term.factor = [](const Eigen::VectorXd&) { return Eigen::VectorXcd::Ones(1).eval(); };
    term.label = "const";
    return kernel_from_terms(1, nu, {std::move(term)}, "rank_one_const");
}

KernelSymbol ker_constant(int nu, double value) {
    SeparableTerm term;
    term.coupling = value;
    term.factor = [](const Eigen::VectorXd&) { return Eigen::VectorXcd::Ones(1).eval(); };
    term.label = "const";
    return kernel_from_terms(1, nu, {std::move(term)}, "const");
}

KernelSymbol ker_cos_modes(int nu, const std::vector<std::pair<int, double>>& modes) {
    std::vector<SeparableTerm> terms;
    terms.reserve(modes.size());
    for (const auto& [freq, coupling] : modes) {
        SeparableTerm term;
        term.coupling = coupling;
        term.factor = [freq](const Eigen::VectorXd& x) {
            Eigen::VectorXcd v(1);
            v(0) = std::cos(freq * x[0]);
            return v;
        };
        term.label = "cos_" + std::to_string(freq);
        terms.push_back(std::move(term));
    }
    return kernel_from_terms(1, nu, std::move(terms), "cos_modes");
}

KernelSymbol ker_one_minus_cos_product(int nu, double scale) {
    SeparableTerm term;
    term.coupling = scale;
    term.factor = [](const Eigen::VectorXd& x) {
        Eigen::VectorXcd v(1);
        v(0) = 1.0 - std::cos(x[0]);
        return v;
    };
    term.label = "one_minus_cos";
    return kernel_from_terms(1, nu, {std::move(term)}, "one_minus_cos_product");
}

KernelSymbol ker_shifted_cos_product(int nu, double shift, double scale) {
    SeparableTerm term;
    term.coupling = scale;
    term.factor = [shift](const Eigen::VectorXd& x) {
        Eigen::VectorXcd v(1);
        v(0) = shift + std::cos(x[0]);
        return v;
    };
    term.label = "shifted_cos";
    return kernel_from_terms(1, nu, {std::move(term)}, "shifted_cos_product");
}

SymbolVariant builtin_symbol(const std::string& name, const BuiltinParams& params, int nu) {
    if (name == "cos_x1") return mat_cos_x1(nu);
    if (name == "diag_shifted_cos") return mat_diag_shifted_cos(nu, params.get("shift", 0.5));
    if (name == "constant") return mat_constant(nu, params.get("value", 0.0));
    if (name == "zero") return ker_zero(nu);
    if (name == "rank_one_const")
        return ker_rank_one_const(nu, params.get("gamma", 1.0 / two_pi));
    if (name == "const") return ker_constant(nu, params.get("value", 0.0));
    if (name == "cos_modes") {
        if (params.modes.empty())
            throw std::invalid_argument("cos_modes needs a non-empty mode list");
        return ker_cos_modes(nu, params.modes);
    }
    if (name == "one_minus_cos_product")
        return ker_one_minus_cos_product(nu, params.get("scale", 1.0));
    if (name == "shifted_cos_product")
        return ker_shifted_cos_product(nu, params.get("shift", 1.0), params.get("scale", 1.0));
    if (name == "accumulation_example") {
        int k_max = static_cast<int>(params.get("k_max", 6.0));
        std::string convention = params.convention.empty() ? "calibrated" : params.convention;
        if (nu != 2)
            throw std::invalid_argument("the accumulation example lives on T^2");
        return example_kernel(k_max, convention);
    }
    throw std::invalid_argument("unknown builtin symbol: " + name);
}

} // namespace fsw
