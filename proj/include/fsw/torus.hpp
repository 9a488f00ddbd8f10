#pragma once

// Uniform grids, quadrature, the flat quotient metric, and discrete Fourier
// analysis on the torus T^d = [0, 2pi)^d.
//
// Node ordering is lexicographic with axis 0 most significant: the flat index
// of the multi-index (j_0, ..., j_{d-1}) is ((j_0 * N + j_1) * N + ...).
// Every matrix assembled downstream depends on this ordering.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fsw {

inline constexpr double pi_v = 3.1415926535897932384626433832795;
inline constexpr double two_pi = 6.283185307179586476925286766559;

// x reduced to [0, 2pi)
double wrap_angle(double x);

// componentwise wrap_angle
Eigen::VectorXd wrap_point(Eigen::VectorXd x);

struct TorusGrid {
    int nu = 0;             // torus dimension
    int points_per_dim = 0; // N, uniform per axis

    double spacing() const { return two_pi / points_per_dim; }
    double weight() const; // quadrature weight per node, (2pi/N)^nu
    std::int64_t node_count() const;

    // flat index <-> per-axis indices (axis 0 most significant)
    void unflatten(std::int64_t flat, int* axes) const;
    std::int64_t flatten(const int* axes) const;

    Eigen::VectorXd node(std::int64_t flat) const;

    // flat index of the node one step along `axis` (periodic)
    std::int64_t neighbor(std::int64_t flat, int axis, int step) const;
};

// Rejects nu < 1 and N < 2.
TorusGrid make_grid(int nu, int points_per_dim);

// Uniform (trapezoidal) rule: weight * sum. Exact for trigonometric
// polynomials of per-axis degree < N/2.
double quadrature(std::span<const double> values, const TorusGrid& grid);
std::complex<double> quadrature(std::span<const std::complex<double>> values,
                                const TorusGrid& grid);

// Euclidean distance minimized over per-axis shifts by multiples of 2pi
// (the flat quotient metric; agrees with the local Euclidean metric in any
// neighbourhood of radius < pi).
double torus_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& x0);

// Coefficients of matrix-valued samples on a TorusGrid, indexed by integer
// frequencies in the symmetric range [-N/2, N/2) per axis. The storage layout
// reuses the grid's flat index with frequency f stored at axis bin
// (f mod N); coefficient 0 is the mean value.
struct FourierTable {
    int dims = 0;
    int points_per_dim = 0;
    int n = 1; // matrix block size
    std::vector<Eigen::MatrixXcd> coef;

    std::int64_t entry_count() const;
    // per-axis frequencies of a flat entry index
    std::vector<int> freq(std::int64_t flat) const;
    // flat entry index of a frequency multi-index; throws if out of range
    std::int64_t index_of(std::span<const int> frequencies) const;

    // trigonometric synthesis at an arbitrary point (x.size() == dims)
    Eigen::MatrixXcd value_at(const Eigen::VectorXd& x) const;

    double max_abs() const;
};

// DFT pair with the convention
//   coef_k = (1/N^d) sum_j samples_j exp(-i <k, x_j>),
//   samples_j = sum_k coef_k exp(+i <k, x_j>),
// so the frequency-0 coefficient is the mean value.
FourierTable fourier_analyze(const std::vector<Eigen::MatrixXcd>& samples,
                             const TorusGrid& grid);
std::vector<Eigen::MatrixXcd> fourier_synthesize(const FourierTable& table,
                                                 const TorusGrid& grid);

// scalar convenience wrappers
FourierTable fourier_analyze_scalar(std::span<const std::complex<double>> samples,
                                    const TorusGrid& grid);
std::vector<std::complex<double>> fourier_synthesize_scalar(const FourierTable& table,
                                                            const TorusGrid& grid);

} // namespace fsw
