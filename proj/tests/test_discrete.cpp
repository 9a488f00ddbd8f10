#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "fsw/bands.hpp"
#include "fsw/discrete.hpp"
#include "fsw/symbols.hpp"
#include "fsw/torus.hpp"

using namespace fsw;

TEST_CASE("with a zero kernel the spectrum is the multiset of node values") {
    TorusGrid grid = make_grid(1, 16);
    DiscretizedOperator op = assemble(mat_cos_x1(1), ker_zero(1), grid);
    CHECK(op.herm_residue < 1e-15);
    CHECK(op.real_valued);

    Eigen::VectorXd eig = hermitian_eigenvalues(op);
    std::vector<double> expected;
    for (std::int64_t i = 0; i < grid.node_count(); ++i)
        expected.push_back(std::cos(grid.node(i)[0]));
    std::sort(expected.begin(), expected.end());
    REQUIRE(eig.size() == static_cast<Eigen::Index>(expected.size()));
    for (Eigen::Index i = 0; i < eig.size(); ++i)
        CHECK(eig[i] == doctest::Approx(expected[static_cast<size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("constant rank-one kernel over a zero symbol has one nonzero eigenvalue") {
    // K(x, y) = -gamma integrates to the rank-one operator -gamma * 2pi * mean,
    // so the only nonzero eigenvalue is -2pi gamma.
    double gamma = 0.35;
    TorusGrid grid = make_grid(1, 32);
    DiscretizedOperator op = assemble(mat_constant(1, 0.0), ker_rank_one_const(1, gamma), grid);
    Eigen::VectorXd eig = hermitian_eigenvalues(op);
    CHECK(eig[0] == doctest::Approx(-two_pi * gamma).epsilon(1e-12));
    for (Eigen::Index i = 1; i < eig.size(); ++i)
        CHECK(std::abs(eig[i]) < 1e-12);
}

TEST_CASE("cosine symbol plus constant kernel reproduces the closed-form bound state") {
    // For H = cos x - gamma * integral, the eigenvalue below the band solves
    // sqrt(z^2 - 1) = 2pi gamma; gamma = 1/(2pi) puts it at -sqrt(2). The
    // quadrature error decays like exp(-N acosh(sqrt 2)).
    double gamma = 1.0 / two_pi;
    TorusGrid grid = make_grid(1, 64);
    DiscretizedOperator op = assemble(mat_cos_x1(1), ker_rank_one_const(1, gamma), grid);
    Eigen::VectorXd eig = hermitian_eigenvalues(op);
    CHECK(eig[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("complex separable kernel stays Hermitian and matches its rank-one oracle") {
    // K(x, y) = exp(i(x - y)) over U = 0: the discretization is w v v^* with
    // v_j = exp(i x_j), so the spectrum is {2pi, 0, ..., 0}.
    KernelSymbol k;
    k.n = 1;
    k.nu = 1;
    k.name = "phase";
    k.eval = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = std::polar(1.0, x[0] - y[0]);
        return m;
    };
    TorusGrid grid = make_grid(1, 24);
    DiscretizedOperator op = assemble(mat_constant(1, 0.0), k, grid);
    CHECK(op.herm_residue < 1e-15);
    CHECK(!op.real_valued);
    Eigen::VectorXd eig = hermitian_eigenvalues(op);
    CHECK(eig[eig.size() - 1] == doctest::Approx(two_pi).epsilon(1e-12));
    CHECK(std::abs(eig[eig.size() - 2]) < 1e-12);
}

TEST_CASE("separable fast path agrees with the pairwise path") {
    KernelSymbol k = ker_cos_modes(1, {{1, 0.7}, {2, -0.3}});
    KernelSymbol pairwise = k;
    pairwise.separable.reset();
    TorusGrid grid = make_grid(1, 20);
    DiscretizedOperator a = assemble(mat_cos_x1(1), k, grid);
    DiscretizedOperator b = assemble(mat_cos_x1(1), pairwise, grid);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assemble enforces the matrix size cap") {
    AssembleOptions options;
    options.max_size = 100;
    CHECK_THROWS_AS(assemble(mat_cos_x1(1), ker_zero(1), make_grid(1, 128), options),
                    ResourceCapError);
}

TEST_CASE("eig_outside drops Ritz values inside or within margin of the bands") {
    BandSet bands = compute_bands(mat_cos_x1(1), make_grid(1, 64), 3);
    Eigen::VectorXd eig(5);
    eig << -2.0, -1.05, -0.5, 0.3, 1.2;
    SpectralResult r = eig_outside(eig, bands, 0.1);
    REQUIRE(r.eigenvalues_outside.size() == 2);
    CHECK(r.eigenvalues_outside[0] == doctest::Approx(-2.0));
    CHECK(r.eigenvalues_outside[1] == doctest::Approx(1.2));
    CHECK(r.gap_labels[0] == 0);
    CHECK(r.gap_labels[1] == 1);
    REQUIRE(r.counts_per_gap.size() == 2);
    CHECK(r.counts_per_gap[0] == 1);
    CHECK(r.counts_per_gap[1] == 1);
}

TEST_CASE("refine_count reports stable-finite for a fixed compact perturbation") {
    MatrixSymbol u = mat_cos_x1(1);
    KernelSymbol k = ker_rank_one_const(1, 1.0 / two_pi);
    BandSet bands = compute_bands(u, make_grid(1, 64), 3);
    StabilityReport rep = refine_count(u, k, bands, {32, 48, 64}, 1e-3);
    CHECK(rep.verdict == "stable-finite");
    REQUIRE(rep.counts.size() == 3);
    for (const auto& c : rep.counts) {
        REQUIRE(c.size() == 2);
        CHECK(c[0] == 1);
        CHECK(c[1] == 0);
    }
    CHECK(rep.last_drift < 1e-10);
}

TEST_CASE("refine_count flags growing eigenvalue counts from a widening kernel") {
    // Over a constant symbol the cosine modes are orthogonal sectors, each
    // contributing exactly one eigenvalue -pi/2 outside the point band; tying
    // the mode count to the resolution makes the outside count grow.
    MatrixSymbol u = mat_constant(1, 0.0);
    BandSet bands = compute_bands(u, make_grid(1, 64), 3);
    auto kernel_at = [](int resolution) {
        std::vector<std::pair<int, double>> modes;
        for (int m = 1; m <= resolution / 16; ++m) modes.emplace_back(m, -0.5);
        return ker_cos_modes(1, modes);
    };
    StabilityReport rep = refine_count(u, kernel_at, bands, {32, 48, 64}, 1e-3);
    CHECK(rep.verdict == "growing");
    CHECK(rep.counts[0][0] == 2);
    CHECK(rep.counts[1][0] == 3);
    CHECK(rep.counts[2][0] == 4);
}

TEST_CASE("refine_count insists on at least three increasing resolutions") {
    MatrixSymbol u = mat_cos_x1(1);
    KernelSymbol k = ker_zero(1);
    BandSet bands = compute_bands(u, make_grid(1, 64), 3);
    CHECK_THROWS_AS(refine_count(u, k, bands, {32, 48}, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(refine_count(u, k, bands, {32, 48, 48}, 1e-3), std::invalid_argument);
}

TEST_CASE("determinant indicator is identically one for a zero kernel") {
    std::vector<BsPoint> scan = birman_schwinger_scan(
        mat_cos_x1(1), ker_zero(1), make_grid(1, 32), {-3.0, -2.0, -1.5});
    for (const BsPoint& p : scan) {
        CHECK(p.sign == 1);
        CHECK(std::abs(p.log_abs_det) < 1e-12);
    }
}

TEST_CASE("determinant indicator changes sign across the bound state") {
    MatrixSymbol u = mat_cos_x1(1);
    KernelSymbol k = ker_rank_one_const(1, 1.0 / two_pi);
    TorusGrid grid = make_grid(1, 64);

    std::vector<BsPoint> scan =
        birman_schwinger_scan(u, k, grid, {-2.0, -1.6, -1.2});
    CHECK(scan[0].sign == 1);  // left of -sqrt(2)
    CHECK(scan[1].sign == 1);  // still left of -sqrt(2)
    CHECK(scan[2].sign == -1); // between -sqrt(2) and the band edge

    double root = birman_schwinger_root(u, k, grid, -2.0, -1.2);
    CHECK(root == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("determinant indicator tends to one far from the spectrum") {
    std::vector<BsPoint> scan = birman_schwinger_scan(
        mat_cos_x1(1), ker_rank_one_const(1, 1.0 / two_pi), make_grid(1, 32), {-1e6});
    CHECK(scan[0].sign == 1);
    CHECK(std::abs(scan[0].log_abs_det) < 1e-4);
}

TEST_CASE("determinant scan rejects z on top of a branch value") {
    // cos attains 1 at the node x = 0, so U(x) - z is singular there.
    CHECK_THROWS_AS(birman_schwinger_scan(mat_cos_x1(1), ker_zero(1), make_grid(1, 32),
                                          std::vector<double>{1.0}),
                    std::invalid_argument);
}
