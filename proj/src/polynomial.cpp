#include "dooc/polynomial.hpp"

#include "dooc/errors.hpp"

#include <algorithm>
#include <limits>

namespace dooc {

std::vector<std::complex<double>> polynomial_roots(const Eigen::VectorXd& ascending) {
    const auto n = ascending.size();
    if (n == 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    companion.topRightCorner(n - 1, n - 1).setIdentity();
    companion.row(n - 1) = -ascending.transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return roots;
}

bool is_hurwitz(const Eigen::VectorXd& ascending) {
    if (ascending.size() == 0) return true;
    // Necessary condition: every coefficient of a Hurwitz monic polynomial is positive.
    if ((ascending.array() <= 0.0).any()) return false;
    return max_real_part(polynomial_roots(ascending)) < 0.0;
}

Eigen::VectorXd binomial_coefficients(int n) {
    if (n < 1) throw ValidationError("binomial_coefficients: order must be >= 1");
    Eigen::VectorXd c(n);
    double value = 1.0;  // C(n, 0)
    for (int k = 0; k < n; ++k) {
        c(k) = value;
        value = value * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    return c;
}

double max_real_part(const std::vector<std::complex<double>>& roots) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) worst = std::max(worst, r.real());
    return worst;
}

}  // namespace dooc
