#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fsw/bands.hpp"
#include "fsw/discrete.hpp"
#include "fsw/example.hpp"
#include "fsw/perturbation.hpp"
#include "fsw/symbols.hpp"
#include "fsw/torus.hpp"

using namespace fsw;

namespace {

double split_reconstruction_error(const KernelSymbol& k, const KernelSplit& split,
                                  int probes) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    double worst = 0.0;
    for (int t = 0; t < probes; ++t) {
        Eigen::VectorXd x(k.nu), y(k.nu);
        for (int a = 0; a < k.nu; ++a) {
            x[a] = angle(rng);
            y[a] = angle(rng);
        }
        Eigen::MatrixXcd err = k.eval(x, y) - split.k1.eval(x, y) - split.k2.eval(x, y);
        worst = std::max(worst, err.cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

TEST_CASE("kernel split reconstructs the kernel and keeps the symmetry") {
    KernelSymbol k = example_kernel(3, "calibrated");
    KernelSplit split = kernel_split(k, 2, make_grid(2, 16));
    CHECK(split.rank > 0);
    CHECK(split.k1_symmetry_residue < 1e-10);
    CHECK(split.k2_symmetry_residue < 1e-10);
    CHECK(split_reconstruction_error(k, split, 40) < 1e-10);
}

TEST_CASE("a trigonometric kernel inside the cutoff splits into k2 alone") {
    KernelSymbol k = ker_cos_modes(1, {{1, 0.8}, {2, -0.4}});
    TorusGrid grid = make_grid(1, 16);
    KernelSplit split = kernel_split(k, 3, grid);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    double k1_peak = 0.0;
    for (int t = 0; t < 40; ++t) {
        Eigen::VectorXd x(1), y(1);
        x << angle(rng);
        y << angle(rng);
        k1_peak = std::max(k1_peak, split.k1.eval(x, y).cwiseAbs().maxCoeff());
    }
    CHECK(k1_peak < 1e-10);
}

TEST_CASE("a zero-mean kernel splits into k1 alone at cutoff zero") {
    KernelSymbol k = ker_cos_modes(1, {{1, 0.8}});
    KernelSplit split = kernel_split(k, 0, make_grid(1, 16));
    CHECK(split.rank == 0);
    Eigen::VectorXd x(1), y(1);
    x << 0.3;
    y << 1.1;
    CHECK(split.k2.eval(x, y).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(split.k1.eval(x, y)(0, 0).real() -
                   0.8 * std::cos(0.3) * std::cos(1.1)) < 1e-10);
}

TEST_CASE("kernel split rejects cutoffs the grid cannot resolve") {
    KernelSymbol k = ker_cos_modes(1, {{1, 0.8}});
    CHECK_THROWS_AS(kernel_split(k, 8, make_grid(1, 16)), std::invalid_argument);
    CHECK_THROWS_AS(kernel_split(k, -1, make_grid(1, 16)), std::invalid_argument);
}

TEST_CASE("split of the accumulation kernel keeps the leading dropped coupling") {
    // Modes k <= cutoff land in k2; the leading term of k1 is mode 3 with
    // coupling s c_3, c_3 = e^{-3} sqrt(2 e^3 + 1) / (2 pi) by the closed form.
    KernelSymbol k = example_kernel(4, "calibrated");
    KernelSplit split = kernel_split(k, 2, make_grid(2, 24));

    double c3 = std::exp(-1.5) * std::sqrt(2.0 + std::exp(-3.0)) / two_pi;
    Eigen::VectorXd x(2), y(2);
    x << 0.0, 0.0;
    y << 0.0, 0.0;
    // at the origin every cos factor is 1: K1(0,0) = s (c_3 + c_4)
    double c4 = c_coefficient(4);
    double expected = (-1.0 / pi_v) * (c3 + c4);
    CHECK(split.k1.eval(x, y)(0, 0).real() == doctest::Approx(expected).epsilon(1e-8));
    CHECK(c_coefficient(3) == doctest::Approx(c3).epsilon(1e-12));
}

TEST_CASE("discretized k2 has rank at most its term count") {
    KernelSymbol k = example_kernel(4, "calibrated");
    TorusGrid grid = make_grid(2, 12);
    KernelSplit split = kernel_split(k, 2, make_grid(2, 16));

    DiscretizedOperator op = assemble(mat_constant(2, 0.0), split.k2, grid);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(op.matrix);
    int numeric_rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++numeric_rank;
    CHECK(numeric_rank <= split.rank);
}

TEST_CASE("weighted diagnostic reports zero remainder as convergent") {
    WeightedL2Report rep =
        weighted_l2_diagnostic(mat_cos_x1(1), -1.0, ker_zero(1), {8, 16, 32});
    CHECK(rep.verdict == "CONVERGENT");
    for (double v : rep.integral) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("weighted diagnostic converges when the kernel cancels the edge zero") {
    // Delta(x, -1) = cos x + 1 vanishes quadratically at x = pi; the kernel
    // (1 + cos x)(1 + cos y) vanishes to the same order, so the weighted
    // integrand is bounded and the quadrature settles. Odd resolutions keep
    // the zero of Delta off the nodes, so nothing is excluded.
    KernelSymbol k = ker_shifted_cos_product(1, 1.0);
    WeightedL2Report rep =
        weighted_l2_diagnostic(mat_cos_x1(1), -1.0, k, {25, 51, 101});
    CHECK(rep.verdict == "CONVERGENT");
    for (std::int64_t e : rep.excluded) CHECK(e == 0);
}

TEST_CASE("weighted diagnostic diverges when the kernel misses the edge zero") {
    // (1 - cos x)(1 - cos y) equals 4 at the zero of Delta(x, -1), so the
    // integrand grows like the inverse fourth power of the distance to x = pi
    // and I_N inflates with N.
    KernelSymbol k = ker_one_minus_cos_product(1);
    WeightedL2Report rep =
        weighted_l2_diagnostic(mat_cos_x1(1), -1.0, k, {16, 32, 64, 128});
    CHECK(rep.verdict == "DIVERGENT");
    CHECK(rep.integral.back() > 10.0 * rep.integral.front());
}

TEST_CASE("weighted diagnostic diverges for a constant remainder") {
    WeightedL2Report rep =
        weighted_l2_diagnostic(mat_cos_x1(1), -1.0, ker_constant(1, 1.0), {16, 32, 64});
    CHECK(rep.verdict == "DIVERGENT");
}

TEST_CASE("weighted diagnostic counts nodes excluded at the singularity") {
    // x = pi is a grid node for even N, and Delta(pi, -1) = 0 there.
    WeightedL2Report rep =
        weighted_l2_diagnostic(mat_cos_x1(1), -1.0, ker_constant(1, 1.0), {16, 32, 64});
    for (std::int64_t e : rep.excluded) CHECK(e > 0);
}

TEST_CASE("rank perturbation shifts gap counts by at most twice the rank") {
    MatrixSymbol u = mat_cos_x1(1);
    KernelSymbol base = ker_rank_one_const(1, 1.0 / two_pi);
    BandSet bands = compute_bands(u, make_grid(1, 64), 3);
    TorusGrid grid = make_grid(1, 96);

    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        int rank = 1 + trial % 3;
        KernelSymbol pert = random_separable_kernel(1, rank, 3, 0.6, rng);
        RankPerturbationReport rep =
            rank_perturbation_experiment(u, base, pert, grid, bands, 1e-3);
        CHECK(rep.rank == rank);
        CHECK(rep.bound_holds);
        CHECK(rep.max_abs_delta <= 2 * rank);
    }
}

TEST_CASE("random separable kernels are reproducible and symmetric") {
    std::mt19937_64 a(123), b(123);
    KernelSymbol ka = random_separable_kernel(2, 2, 3, 0.5, a);
    KernelSymbol kb = random_separable_kernel(2, 2, 3, 0.5, b);
    Eigen::VectorXd x(2), y(2);
    x << 0.7, 2.1;
    y << 4.4, 1.3;
    CHECK((ka.eval(x, y) - kb.eval(x, y)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(kernel_symmetry_residue(ka, make_grid(2, 8)) < 1e-12);
    REQUIRE(ka.separable.has_value());
    CHECK(static_cast<int>(ka.separable->size()) == 2);
}
