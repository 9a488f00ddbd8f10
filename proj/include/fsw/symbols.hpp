#pragma once

// Coefficient functions of the operator: the Hermitian multiplication symbol
// U(x) on T^nu and the kernel K(x, y) on T^nu x T^nu with K(x,y)^* = K(y,x).
// Symbols are immutable after construction and safe to evaluate from many
// threads. Three interchangeable representations are supported: a callable
// builtin, trigonometric interpolation of a Fourier table, and a separable
// term list  K(x,y) = sum_k c_k a_k(x) a_k(y)^*  with real couplings c_k.
// Conversions between representations are explicit, never silent.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fsw/torus.hpp"

namespace fsw {

struct MatrixSymbol {
    int n = 1;
    int nu = 1;
    std::string name;
    std::function<Eigen::MatrixXcd(const Eigen::VectorXd&)> eval;
    std::shared_ptr<const FourierTable> fourier; // optional backing
};

struct SeparableTerm {
    double coupling = 0.0;
    std::function<Eigen::VectorXcd(const Eigen::VectorXd&)> factor; // a_k: T^nu -> C^n
    std::string label;
};

struct KernelSymbol {
    int n = 1;
    int nu = 1;
    std::string name;
    std::function<Eigen::MatrixXcd(const Eigen::VectorXd&, const Eigen::VectorXd&)> eval;
    std::optional<std::vector<SeparableTerm>> separable;
    std::shared_ptr<const FourierTable> fourier; // optional joint-table backing (dims = 2 nu)

    // sum over separable terms; throws when no separable form is attached
    Eigen::MatrixXcd eval_separable(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
};

// max-norm deviation from the adjoint, ||M - M^*||_max
double hermitian_deviation(const Eigen::MatrixXcd& m);

// Sorted (ascending) eigenvalues of U(x); throws if U(x) deviates from
// Hermitian by more than herm_tol.
Eigen::VectorXd symbol_eigenvalues(const MatrixSymbol& u, const Eigen::VectorXd& x,
                                   double herm_tol = 1e-10);

struct SymmetryReport {
    double u_max_deviation = 0.0; // max ||U(x) - U(x)^*||_max over nodes
    double k_max_deviation = 0.0; // max ||K(x,y) - K(y,x)^*||_max over node pairs
    double tol = 0.0;
    bool pass = false;
};

SymmetryReport validate_symmetry(const MatrixSymbol& u, const KernelSymbol& k,
                                 const TorusGrid& grid, double tol);

// kernel-only half of validate_symmetry
double kernel_symmetry_residue(const KernelSymbol& k, const TorusGrid& grid);

// Heuristic smoothness diagnostic from the decay of the kernel's joint
// Fourier coefficients: the slope of log(shell max magnitude) against
// log(total frequency), offset by the dimension of the joint torus the
// kernel lives on. Reported with the fit residual; never a certified bound.
struct SmoothnessEstimate {
    double alpha_hat = 0.0;
    bool infinite = false;     // coefficients hit numerical zero beyond some shell
    bool inconclusive = false; // fewer than 4 usable frequency shells
    double fit_quality = 0.0;  // rms residual of the log-log fit
    double slope = 0.0;
    int shell_min = 0;
    int shell_max = 0;
};

// Samples K on the joint grid T^{2 nu} with `grid`'s per-axis resolution
// (N >= 16 required so enough shells are resolved).
SmoothnessEstimate smoothness_index(const KernelSymbol& k, const TorusGrid& grid);

// ---- constructors -----------------------------------------------------------

MatrixSymbol matrix_from_fourier(FourierTable table, int nu, std::string name = "fourier");
KernelSymbol kernel_from_fourier(FourierTable joint_table, int nu, std::string name = "fourier");
KernelSymbol kernel_from_terms(int n, int nu, std::vector<SeparableTerm> terms,
                               std::string name);

KernelSymbol kernel_sum(const KernelSymbol& a, const KernelSymbol& b, std::string name = "");
KernelSymbol kernel_scale(const KernelSymbol& k, double factor);

// ---- builtin catalog --------------------------------------------------------

// Parameter bag for builtin_symbol. `modes` feeds kernels assembled from
// harmonics (list of (frequency, coupling)); `convention` selects the sign /
// normalization convention of the shipped counterexample kernel.
struct BuiltinParams {
    std::map<std::string, double> scalars;
    std::vector<std::pair<int, double>> modes;
    std::string convention;

    double get(const std::string& key, double fallback) const;
};

using SymbolVariant = std::variant<MatrixSymbol, KernelSymbol>;

// Known names:
//   matrix symbols: "cos_x1", "diag_shifted_cos" (shift), "constant" (value)
//   kernels: "zero", "rank_one_const" (gamma; K = -gamma), "const" (value),
//            "cos_modes" (modes), "one_minus_cos_product" (scale),
//            "shifted_cos_product" (shift, scale),
//            "accumulation_example" (k_max, convention)
// Throws std::invalid_argument for unknown names.
SymbolVariant builtin_symbol(const std::string& name, const BuiltinParams& params, int nu);

// typed factories used directly by tests and the gallery
MatrixSymbol mat_cos_x1(int nu);
MatrixSymbol mat_diag_shifted_cos(int nu, double shift);
MatrixSymbol mat_constant(int nu, double value);
KernelSymbol ker_zero(int nu);
KernelSymbol ker_rank_one_const(int nu, double gamma); // K(x,y) = -gamma
KernelSymbol ker_constant(int nu, double value);
KernelSymbol ker_cos_modes(int nu, const std::vector<std::pair<int, double>>& modes);
KernelSymbol ker_one_minus_cos_product(int nu, double scale = 1.0);
// K(x,y) = scale * (shift + cos x_1)(shift + cos y_1)
KernelSymbol ker_shifted_cos_product(int nu, double shift, double scale = 1.0);

} // namespace fsw
