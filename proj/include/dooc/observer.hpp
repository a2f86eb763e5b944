#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace dooc {

/// High-gain observer for an integrator chain of length n driven by the
/// measured output alone. c_1..c_n make lambda^n + c_n lambda^(n-1) + ...
/// + c_1 Hurwitz; h scales the correction gains by increasing powers.
struct ObserverSpec {
    int n = 0;
    double h = 1.0;
    Eigen::VectorXd c;

    static ObserverSpec binomial(int n, double h);

    void validate() const;
};

/// Correction column of the observer: k-th entry h^k c_{n-k+1}.
Eigen::VectorXd observer_gain(const ObserverSpec& spec);

/// x_tilde' = (x_tilde_2, ..., x_tilde_n, 0) + gain * (y - x_tilde_1).
Eigen::VectorXd observer_rhs(const ObserverSpec& spec, const Eigen::VectorXd& x_tilde, double y);

/// Eigenvalues of the scaled estimation-error dynamics: h times the roots of
/// the coefficient polynomial. Diagnostic; rejects non-Hurwitz coefficients.
std::vector<std::complex<double>> estimation_error_spectrum(const ObserverSpec& spec);

}  // namespace dooc
