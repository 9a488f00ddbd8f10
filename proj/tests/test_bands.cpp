#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fsw/bands.hpp"
#include "fsw/symbols.hpp"
#include "fsw/torus.hpp"

using namespace fsw;

TEST_CASE("scalar cosine symbol sweeps exactly [-1, 1]") {
    BandSet bands = compute_bands(mat_cos_x1(1), make_grid(1, 64), 3);
    REQUIRE(bands.bands.size() == 1);
    CHECK(bands.bands[0].lo == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(bands.bands[0].hi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bands.refinement_converged);
    REQUIRE(bands.gamma.size() == 2);
    CHECK(bands.gamma[0] == doctest::Approx(-1.0));
    CHECK(bands.gamma[1] == doctest::Approx(1.0));
}

TEST_CASE("polish recovers endpoints that fall between grid nodes") {
    // N = 2 mod 4 grids miss x = pi/2 where sin peaks; the endpoint polish
    // must still land on +-1 well beyond grid accuracy.
    MatrixSymbol u;
    u.n = 1;
    u.nu = 1;
    u.name = "sin_x1";
    u.eval = [](const Eigen::VectorXd& x) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = std::sin(x[0]);
        return m;
    };
    BandSet bands = compute_bands(u, make_grid(1, 6), 5);
    REQUIRE(bands.bands.size() == 1);
    CHECK(std::abs(bands.bands[0].lo + 1.0) < 1e-9);
    CHECK(std::abs(bands.bands[0].hi - 1.0) < 1e-9);
}

TEST_CASE("separated diagonal branches give two bands") {
    BandSet bands = compute_bands(mat_diag_shifted_cos(1, 5.0), make_grid(1, 64), 3);
    REQUIRE(bands.bands.size() == 2);
    CHECK(bands.bands[0].lo == doctest::Approx(-1.0));
    CHECK(bands.bands[0].hi == doctest::Approx(1.0));
    CHECK(bands.bands[1].lo == doctest::Approx(4.0));
    CHECK(bands.bands[1].hi == doctest::Approx(6.0));
    CHECK(bands.gamma.size() == 4);
}

TEST_CASE("overlapping and touching branches merge into one band") {
    BandSet overlap = compute_bands(mat_diag_shifted_cos(1, 1.0), make_grid(1, 64), 3);
    REQUIRE(overlap.bands.size() == 1);
    CHECK(overlap.bands[0].lo == doctest::Approx(-1.0));
    CHECK(overlap.bands[0].hi == doctest::Approx(2.0));
    CHECK(overlap.branch_ranges.size() == 2);

    BandSet touch = compute_bands(mat_diag_shifted_cos(1, 2.0), make_grid(1, 64), 3);
    REQUIRE(touch.bands.size() == 1);
    CHECK(touch.bands[0].lo == doctest::Approx(-1.0));
    CHECK(touch.bands[0].hi == doctest::Approx(3.0));
}

TEST_CASE("constant symbol collapses to a point band") {
    BandSet bands = compute_bands(mat_constant(1, 2.5), make_grid(1, 16), 2);
    REQUIRE(bands.bands.size() == 1);
    CHECK(bands.bands[0].lo == doctest::Approx(2.5));
    CHECK(bands.bands[0].hi == doctest::Approx(2.5));
    GammaPoints gp = gamma_points(bands);
    CHECK(gp.values.size() == 1);
    CHECK(gp.collapsed == 1);
}

TEST_CASE("distance and gap_index classify points against the bands") {
    BandSet bands = compute_bands(mat_diag_shifted_cos(1, 5.0), make_grid(1, 64), 3);
    CHECK(bands.distance(0.0) == doctest::Approx(0.0));
    CHECK(bands.distance(-1.5) == doctest::Approx(0.5));
    CHECK(bands.distance(2.0) == doctest::Approx(1.0));
    CHECK(bands.distance(7.0) == doctest::Approx(1.0));
    CHECK(bands.gap_index(-3.0) == 0);
    CHECK(bands.gap_index(2.5) == 1);
    CHECK(bands.gap_index(8.0) == 2);
}

TEST_CASE("delta matches the product of shifted eigenvalue branches") {
    MatrixSymbol u = mat_diag_shifted_cos(1, 5.0);
    Eigen::VectorXd x(1);
    x << 0.9;
    double z = 1.7;
    double expected = (std::cos(0.9) - z) * (5.0 + std::cos(0.9) - z);
    CHECK(delta(u, x, z) == doctest::Approx(expected).epsilon(1e-12));

    ScalarField phi = phi_z(u, z);
    CHECK(phi(x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("delta vanishes exactly on the branch values") {
    MatrixSymbol u = mat_cos_x1(2);
    Eigen::VectorXd x(2);
    x << 1.1, 0.3;
    CHECK(delta(u, x, std::cos(1.1)) == doctest::Approx(0.0));
}

TEST_CASE("band edges are globally extremal values, interior points are not") {
    MatrixSymbol u = mat_cos_x1(1);
    TorusGrid grid = make_grid(1, 128);

    ExtremalVerdict lo = verify_global_extremal(u, -1.0, grid, 1e-9);
    CHECK(lo.globally_extremal);
    CHECK(lo.min_value >= -1e-9);

    ExtremalVerdict hi = verify_global_extremal(u, 1.0, grid, 1e-9);
    CHECK(hi.globally_extremal);
    CHECK(hi.max_value <= 1e-9);

    ExtremalVerdict mid = verify_global_extremal(u, 0.0, grid, 1e-9);
    CHECK(!mid.globally_extremal);
}

TEST_CASE("interior gap edge of a two-band symbol is globally extremal") {
    // For diag(cos x, 5 + cos x), z = 1 is the top of the lower band:
    // delta = (cos x - 1)(cos x + 4) <= 0 with zeros attained.
    MatrixSymbol u = mat_diag_shifted_cos(1, 5.0);
    TorusGrid grid = make_grid(1, 128);
    ExtremalVerdict v = verify_global_extremal(u, 1.0, grid, 1e-9);
    CHECK(v.globally_extremal);
    // z = 5 sits inside the upper band; delta changes sign there
    CHECK(!verify_global_extremal(u, 5.0, grid, 1e-9).globally_extremal);
}

TEST_CASE("bands agree with a brute-force eigenvalue scan") {
    MatrixSymbol u = mat_diag_shifted_cos(2, 3.0);
    BandSet bands = compute_bands(u, make_grid(2, 24), 2);

    TorusGrid fine = make_grid(2, 96);
    double lo0 = 1e9, hi0 = -1e9, lo1 = 1e9, hi1 = -1e9;
    for (std::int64_t i = 0; i < fine.node_count(); ++i) {
        Eigen::VectorXd lam = symbol_eigenvalues(u, fine.node(i));
        lo0 = std::min(lo0, lam[0]);
        hi0 = std::max(hi0, lam[0]);
        lo1 = std::min(lo1, lam[1]);
        hi1 = std::max(hi1, lam[1]);
    }
    REQUIRE(bands.bands.size() == 2);
    CHECK(bands.bands[0].lo <= lo0 + 1e-9);
    CHECK(bands.bands[0].hi >= hi0 - 1e-9);
    CHECK(bands.bands[1].lo <= lo1 + 1e-9);
    CHECK(bands.bands[1].hi >= hi1 - 1e-9);
}
