#pragma once

// Small numerical utilities shared by the spectral modules: 1-D bracketed
// minimization and root finding, least-squares line fits, coordinate-wise
// polishing of extrema on the torus, and deterministic sphere directions.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fsw {

using Scalar1D = std::function<double(double)>;
using ScalarField = std::function<double(const Eigen::VectorXd&)>;

// Golden-section minimum of f on [a, b]; assumes unimodality on the bracket.
// Returns the abscissa; iterations fixed so the result is deterministic.
double golden_section_min(const Scalar1D& f, double a, double b, int iterations = 80);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

// Ordinary least squares y ~ slope*x + intercept. Needs >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Bisection on a sign change; f(lo) and f(hi) must have opposite signs.
double bisect_root(const Scalar1D& f, double lo, double hi, double xtol,
                   int max_iterations = 200);

// Coordinate-wise golden-section refinement of a local minimum of f near x0,
// searching within +-radius per axis, `sweeps` passes over the axes.
// Coordinates are wrapped back into [0, 2pi).
Eigen::VectorXd polish_minimum(const ScalarField& f, Eigen::VectorXd x0,
                               double radius, int sweeps = 3);

// Deterministic unit directions on S^{nu-1}: the 2*nu coordinate axes first,
// then a low-discrepancy sequence (uniform angles for nu = 2, a Fibonacci
// lattice for nu = 3). For nu = 1 this is {+1, -1}.
std::vector<Eigen::VectorXd> sphere_directions(int nu, int count);

} // namespace fsw
