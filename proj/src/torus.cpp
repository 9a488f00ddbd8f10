#include "fsw/torus.hpp"

#include <cmath>
#include <stdexcept>

namespace fsw {

double wrap_angle(double x) {
    x -= two_pi * std::floor(x / two_pi);
    // x == 2pi can survive the floor when x was a tiny negative number
    return (x >= 0.0 && x < two_pi) ? x : 0.0;
}

Eigen::VectorXd wrap_point(Eigen::VectorXd x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = wrap_angle(x[i]);
    return x;
}

double TorusGrid::weight() const {
    double w = 1.0;
    for (int a = 0; a < nu; ++a) w *= spacing();
    return w;
}

std::int64_t TorusGrid::node_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < nu; ++a) c *= points_per_dim;
    return c;
}

void TorusGrid::unflatten(std::int64_t flat, int* axes) const {
    for (int a = nu - 1; a >= 0; --a) {
        axes[a] = static_cast<int>(flat % points_per_dim);
        flat /= points_per_dim;
    }
}

std::int64_t TorusGrid::flatten(const int* axes) const {
    std::int64_t flat = 0;
    for (int a = 0; a < nu; ++a) flat = flat * points_per_dim + axes[a];
    return flat;
}

Eigen::VectorXd TorusGrid::node(std::int64_t flat) const {
    int axes[8];
    unflatten(flat, axes);
    Eigen::VectorXd x(nu);
    for (int a = 0; a < nu; ++a) x[a] = spacing() * axes[a];
    return x;
}

std::int64_t TorusGrid::neighbor(std::int64_t flat, int axis, int step) const {
    int axes[8];
    unflatten(flat, axes);
    int j = axes[axis] + step;
    j %= points_per_dim;
    if (j < 0) j += points_per_dim;
    axes[axis] = j;
    return flatten(axes);
}

TorusGrid make_grid(int nu, int points_per_dim) {
    if (nu < 1) throw std::invalid_argument("make_grid: dimension must be >= 1");
    if (nu > 8) throw std::invalid_argument("make_grid: dimension larger than supported (8)");
    if (points_per_dim < 2)
        throw std::invalid_argument("make_grid: need at least 2 points per axis");
    return TorusGrid{nu, points_per_dim};
}

double quadrature(std::span<const double> values, const TorusGrid& grid) {
    if (static_cast<std::int64_t>(values.size()) != grid.node_count())
        throw std::invalid_argument("quadrature: one value per node required");
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.weight();
}

std::complex<double> quadrature(std::span<const std::complex<double>> values,
                                const TorusGrid& grid) {
    if (static_cast<std::int64_t>(values.size()) != grid.node_count())
        throw std::invalid_argument("quadrature: one value per node required");
    std::complex<double> s = 0.0;
    for (const auto& v : values) s += v;
    return s * grid.weight();
}

double torus_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& x0) {
    if (x.size() != x0.size())
        throw std::invalid_argument("torus_distance: dimension mismatch");
    double sq = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double d = std::fabs(wrap_angle(x[i]) - wrap_angle(x0[i]));
        if (d > two_pi - d) d = two_pi - d;
        sq += d * d;
    }
    return std::sqrt(sq);
}

std::int64_t FourierTable::entry_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dims; ++a) c *= points_per_dim;
    return c;
}

std::vector<int> FourierTable::freq(std::int64_t flat) const {
    std::vector<int> f(dims);
    const int N = points_per_dim;
    for (int a = dims - 1; a >= 0; --a) {
        int bin = static_cast<int>(flat % N);
        flat /= N;
        f[a] = (bin <= (N - 1) / 2) ? bin : bin - N;
    }
    return f;
}

std::int64_t FourierTable::index_of(std::span<const int> frequencies) const {
    if (static_cast<int>(frequencies.size()) != dims)
        throw std::invalid_argument("FourierTable::index_of: dimension mismatch");
    const int N = points_per_dim;
    const int lo = -(N / 2), hi = lo + N - 1;
    std::int64_t flat = 0;
    for (int a = 0; a < dims; ++a) {
        int f = frequencies[a];
        if (f < lo || f > hi)
            throw std::invalid_argument("FourierTable::index_of: frequency out of range");
        int bin = (f >= 0) ? f : f + N;
        flat = flat * N + bin;
    }
    return flat;
}

Eigen::MatrixXcd FourierTable::value_at(const Eigen::VectorXd& x) const {
    if (static_cast<int>(x.size()) != dims)
        throw std::invalid_argument("FourierTable::value_at: dimension mismatch");
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    const std::int64_t count = entry_count();
    for (std::int64_t i = 0; i < count; ++i) {
        const std::vector<int> f = freq(i);
        double phase = 0.0;
        for (int a = 0; a < dims; ++a) phase += f[a] * x[a];
        acc += coef[i] * std::exp(std::complex<double>(0.0, phase));
    }
    return acc;
}

double FourierTable::max_abs() const {
    double m = 0.0;
    for (const auto& c : coef) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

namespace {

// In-place per-axis DFT of a scalar array laid out in grid order.
// sign = -1 analyzes, sign = +1 synthesizes; normalization handled by caller.
void dft_all_axes(std::vector<std::complex<double>>& data, int dims, int N, int sign) {
    // precomputed N x N twiddle matrix
    Eigen::MatrixXcd F(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
            F(j, k) = std::exp(std::complex<double>(0.0, sign * two_pi * j * k / N));

    std::int64_t total = 1;
    for (int a = 0; a < dims; ++a) total *= N;

    Eigen::VectorXcd line(N), out(N);
    for (int axis = 0; axis < dims; ++axis) {
        // stride between consecutive entries along `axis`
        std::int64_t stride = 1;
        for (int a = axis + 1; a < dims; ++a) stride *= N;
        const std::int64_t block = stride * N;
        for (std::int64_t base = 0; base < total; base += block) {
            for (std::int64_t off = 0; off < stride; ++off) {
                for (int j = 0; j < N; ++j) line[j] = data[base + off + j * stride];
                out.noalias() = F * line;
                for (int j = 0; j < N; ++j) data[base + off + j * stride] = out[j];
            }
        }
    }
}

} // namespace

FourierTable fourier_analyze(const std::vector<Eigen::MatrixXcd>& samples,
                             const TorusGrid& grid) {
    const std::int64_t count = grid.node_count();
    if (static_cast<std::int64_t>(samples.size()) != count)
        throw std::invalid_argument("fourier_analyze: one sample per node required");
    const int n = static_cast<int>(samples.front().rows());

    FourierTable table;
    table.dims = grid.nu;
    table.points_per_dim = grid.points_per_dim;
    table.n = n;
    table.coef.assign(count, Eigen::MatrixXcd::Zero(n, n));

    std::vector<std::complex<double>> scratch(count);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            for (std::int64_t i = 0; i < count; ++i) scratch[i] = samples[i](r, c);
            dft_all_axes(scratch, grid.nu, grid.points_per_dim, -1);
            const double norm = 1.0 / static_cast<double>(count);
            for (std::int64_t i = 0; i < count; ++i) table.coef[i](r, c) = scratch[i] * norm;
        }
    }
    return table;
}

std::vector<Eigen::MatrixXcd> fourier_synthesize(const FourierTable& table,
                                                 const TorusGrid& grid) {
    if (grid.nu != table.dims || grid.points_per_dim != table.points_per_dim)
        throw std::invalid_argument("fourier_synthesize: grid does not match table");
    const std::int64_t count = table.entry_count();
    const int n = table.n;
    std::vector<Eigen::MatrixXcd> samples(count, Eigen::MatrixXcd::Zero(n, n));
    std::vector<std::complex<double>> scratch(count);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            for (std::int64_t i = 0; i < count; ++i) scratch[i] = table.coef[i](r, c);
            dft_all_axes(scratch, table.dims, table.points_per_dim, +1);
            for (std::int64_t i = 0; i < count; ++i) samples[i](r, c) = scratch[i];
        }
    }
    return samples;
}

FourierTable fourier_analyze_scalar(std::span<const std::complex<double>> samples,
                                    const TorusGrid& grid) {
    std::vector<Eigen::MatrixXcd> wrapped(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        wrapped[i] = Eigen::MatrixXcd::Constant(1, 1, samples[i]);
    }
    return fourier_analyze(wrapped, grid);
}

std::vector<std::complex<double>> fourier_synthesize_scalar(const FourierTable& table,
                                                            const TorusGrid& grid) {
    auto mats = fourier_synthesize(table, grid);
    std::vector<std::complex<double>> out(mats.size());
    for (std::size_t i = 0; i < mats.size(); ++i) out[i] = mats[i](0, 0);
    return out;
}

} // namespace fsw
