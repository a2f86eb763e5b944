#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace dooc {

// Monic polynomial helpers. Coefficients are stored in ascending order of
// degree and exclude the leading 1: `a` of size n describes
//   lambda^n + a[n-1] lambda^(n-1) + ... + a[1] lambda + a[0].
// This matches the coefficient vectors used by the observer (c_1..c_n) and
// the composite-variable chain (gamma_1..gamma_{n-1}).

// Roots via the companion-matrix eigenproblem.
std::vector<std::complex<double>> polynomial_roots(const Eigen::VectorXd& ascending);

// All roots strictly in the open left half plane. Runs the positive
// coefficient necessity screen first so an obviously bad vector is rejected
// without an eigensolve.
bool is_hurwitz(const Eigen::VectorXd& ascending);

// Coefficients of (lambda + 1)^n, ascending, leading 1 dropped.
// binomial_coefficients(2) = (1, 2), binomial_coefficients(3) = (1, 3, 3).
Eigen::VectorXd binomial_coefficients(int n);

double max_real_part(const std::vector<std::complex<double>>& roots);

}  // namespace dooc
