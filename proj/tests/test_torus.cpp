#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "fsw/torus.hpp"

using namespace fsw;

TEST_CASE("wrap_angle lands in [0, 2pi)") {
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    CHECK(wrap_angle(two_pi) == doctest::Approx(0.0));
    CHECK(wrap_angle(-0.5) == doctest::Approx(two_pi - 0.5));
    CHECK(wrap_angle(7.0 * two_pi + 1.25) == doctest::Approx(1.25));
    for (double x : {-100.0, -3.2, 0.0, 1.0, 6.28, 500.75}) {
        double w = wrap_angle(x);
        CHECK(w >= 0.0);
        CHECK(w < two_pi);
    }
}

TEST_CASE("grid indexing round-trips and axis 0 is most significant") {
    TorusGrid grid = make_grid(3, 5);
    CHECK(grid.node_count() == 125);
    int axes[3];
    for (std::int64_t flat = 0; flat < grid.node_count(); ++flat) {
        grid.unflatten(flat, axes);
        CHECK(grid.flatten(axes) == flat);
    }
    // (1, 0, 0) -> 25, (0, 0, 1) -> 1
    int a[3] = {1, 0, 0};
    CHECK(grid.flatten(a) == 25);
    int b[3] = {0, 0, 1};
    CHECK(grid.flatten(b) == 1);
}

TEST_CASE("neighbor wraps periodically") {
    TorusGrid grid = make_grid(2, 4);
    int axes[2] = {0, 3};
    std::int64_t flat = grid.flatten(axes);
    std::int64_t right = grid.neighbor(flat, 1, 1);
    int raxes[2];
    grid.unflatten(right, raxes);
    CHECK(raxes[0] == 0);
    CHECK(raxes[1] == 0);
    std::int64_t up = grid.neighbor(flat, 0, -1);
    grid.unflatten(up, raxes);
    CHECK(raxes[0] == 3);
    CHECK(raxes[1] == 3);
}

TEST_CASE("make_grid rejects bad shapes") {
    CHECK_THROWS_AS(make_grid(0, 8), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(9, 4), std::invalid_argument);
}

TEST_CASE("uniform rule is exact on low-order trigonometric polynomials") {
    TorusGrid grid = make_grid(2, 16);
    std::vector<double> values(static_cast<size_t>(grid.node_count()));

    // integral of (2 + cos x1)(1 + sin 3 x2) over T^2 is 2 * (2pi)^2
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
        Eigen::VectorXd x = grid.node(i);
        values[static_cast<size_t>(i)] = (2.0 + std::cos(x[0])) * (1.0 + std::sin(3.0 * x[1]));
    }
    CHECK(quadrature(values, grid) == doctest::Approx(2.0 * two_pi * two_pi).epsilon(1e-13));

    // any pure nonzero mode of per-axis degree < N/2 integrates to zero
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
        Eigen::VectorXd x = grid.node(i);
        values[static_cast<size_t>(i)] = std::cos(5.0 * x[0] + 2.0 * x[1]);
    }
    CHECK(quadrature(values, grid) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("torus distance minimizes over the periodic images") {
    Eigen::VectorXd x(1), y(1);
    x << 0.1;
    y << two_pi - 0.1;
    CHECK(torus_distance(x, y) == doctest::Approx(0.2));

    Eigen::VectorXd a(2), b(2);
    a << 0.0, 0.0;
    b << pi_v, two_pi - 1.0;
    CHECK(torus_distance(a, b) == doctest::Approx(std::sqrt(pi_v * pi_v + 1.0)));
}

TEST_CASE("DFT round-trips and matches known coefficients") {
    TorusGrid grid = make_grid(2, 8);
    std::vector<Eigen::MatrixXcd> samples;
    samples.reserve(static_cast<size_t>(grid.node_count()));
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
        Eigen::VectorXd x = grid.node(i);
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = 3.0 + 2.0 * std::cos(x[0]) + std::sin(2.0 * x[1]);
        samples.push_back(m);
    }
    FourierTable table = fourier_analyze(samples, grid);

    // mean
    std::vector<int> f0 = {0, 0};
    CHECK(std::abs(table.coef[static_cast<size_t>(table.index_of(f0))](0, 0) - 3.0) < 1e-12);
    // cos x1 splits into (1, 0) and (-1, 0) with weight 1 each
    std::vector<int> fp = {1, 0};
    CHECK(std::abs(table.coef[static_cast<size_t>(table.index_of(fp))](0, 0) - 1.0) < 1e-12);
    // sin 2 x2 -> -i/2 at (0, 2), +i/2 at (0, -2)
    std::vector<int> fs = {0, 2};
    CHECK(std::abs(table.coef[static_cast<size_t>(table.index_of(fs))](0, 0) -
                   std::complex<double>(0.0, -0.5)) < 1e-12);

    std::vector<Eigen::MatrixXcd> back = fourier_synthesize(table, grid);
    double err = 0.0;
    for (size_t i = 0; i < samples.size(); ++i)
        err = std::max(err, (samples[i] - back[i]).cwiseAbs().maxCoeff());
    CHECK(err < 1e-12);

    // synthesis agrees with pointwise evaluation off the grid too
    Eigen::VectorXd x(2);
    x << 0.7, 2.9;
    std::complex<double> direct = 3.0 + 2.0 * std::cos(x[0]) + std::sin(2.0 * x[1]);
    CHECK(std::abs(table.value_at(x)(0, 0) - direct) < 1e-12);
}

TEST_CASE("frequency index round-trips over the symmetric range") {
    TorusGrid grid = make_grid(2, 8);
    std::vector<Eigen::MatrixXcd> samples(
        static_cast<size_t>(grid.node_count()), Eigen::MatrixXcd::Zero(1, 1));
    FourierTable table = fourier_analyze(samples, grid);
    for (std::int64_t e = 0; e < table.entry_count(); ++e) {
        std::vector<int> f = table.freq(e);
        CHECK(table.index_of(f) == e);
        for (int v : f) {
            CHECK(v >= -4);
            CHECK(v < 4);
        }
    }
    std::vector<int> out_of_range = {4, 0};
    CHECK_THROWS_AS(table.index_of(out_of_range), std::invalid_argument);
}
