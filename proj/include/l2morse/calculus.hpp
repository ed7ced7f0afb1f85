#pragma once
#include <variant>
#include <vector>

#include "l2morse/operator.hpp"

namespace l2morse {

// Spectral test functions the calculus knows how to expand.
struct HeatFunction {
    double s = 1.0; // f(x) = exp(-s x)
};
struct CutoffFunction {
    double a = 1.0, b = 2.0; // 1 on [0,a], smooth bump transition, 0 beyond b
};
using SpectralFunction = std::variant<HeatFunction, CutoffFunction>;

double eval_spectral(const SpectralFunction& f, double x);

// Chebyshev coefficients of f on [0, lam_max] (basis T_j(2x/lam_max - 1)),
// computed by Gauss-Chebyshev quadrature with node doubling until the
// coefficients are stable to eps/40 (so the quadrature contributes at most
// eps/10 of the error budget), then truncated at the shortest tail with
// sum |c_j| <= 0.7*eps. The returned expansion therefore satisfies
// sup_{[0,lam_max]} |f - p| <= eps. Closed forms (Bessel) are deliberately
// not used here: for the strongly scaled operators the modified Bessel
// factors overflow long before the quadrature loses accuracy.
std::vector<double> chebyshev_coeffs(const SpectralFunction& f, double lam_max,
                                     double eps, int max_degree = 16384);

struct CalculusOptions {
    double eps = 1e-8;
    int max_degree = 16384;
    // Certified global spectral bound. <= 0 means: take the Gershgorin bound
    // of the (margin-complete) stored rows, which is exact for invariant
    // operators and window evidence otherwise.
    double lam_max_override = 0.0;
};

struct PolyResult {
    WindowedOperator op;
    int degree = 0;
    double lam_max = 0.0;
    double coeff_tail = 0.0; // discarded-tail mass, part of the eps budget
};

// p(A) for the Chebyshev expansion p of f, evaluated by the three-term
// recurrence on basis columns (orthonormal basis, so the recurrence is
// symmetric). Requires a square self-adjoint operator.
//
// Invariant operators run the recurrence in deck-offset space: the result is
// again invariant, exact everywhere, and entirely independent of the window.
// General operators consume exactness margin: the result margin is
// margin(A) - degree*radius(A), and the call reports how much window is
// missing when that is negative. ||f(A) - p(A)|| <= eps whenever the true
// spectrum lies in [0, lam_max].
PolyResult poly_calculus(const WindowedOperator& A, const SpectralFunction& f,
                         const CalculusOptions& opt = {});

// Brute-force oracle: f applied through a dense eigendecomposition of a
// symmetric matrix (the window truncation of an operator, see to_dense_on).
Eigen::MatrixXd dense_function_on(const Eigen::MatrixXd& sym, const SpectralFunction& f);

} // namespace l2morse
