#include "dooc/observer.hpp"

#include "dooc/errors.hpp"
#include "dooc/polynomial.hpp"

#include <cmath>

namespace dooc {

ObserverSpec ObserverSpec::binomial(int n, double h) {
    ObserverSpec spec;
    spec.n = n;
    spec.h = h;
    spec.c = binomial_coefficients(n);
    spec.validate();
    return spec;
}

void ObserverSpec::validate() const {
    if (n < 1) throw ValidationError("observer: chain length must be >= 1");
    if (h <= 0.0) throw ValidationError("observer: high-gain parameter h must be positive");
    if (c.size() != n) throw ValidationError("observer: coefficient count must equal chain length");
    if (!is_hurwitz(c)) throw ValidationError("observer: coefficient polynomial is not Hurwitz");
}

Eigen::VectorXd observer_gain(const ObserverSpec& spec) {
    Eigen::VectorXd gain(spec.n);
    double hk = 1.0;
    for (int k = 1; k <= spec.n; ++k) {
        hk *= spec.h;
        gain(k - 1) = hk * spec.c(spec.n - k);
    }
    return gain;
}

Eigen::VectorXd observer_rhs(const ObserverSpec& spec, const Eigen::VectorXd& x_tilde, double y) {
    Eigen::VectorXd d(spec.n);
    if (spec.n > 1) d.head(spec.n - 1) = x_tilde.tail(spec.n - 1);
    d(spec.n - 1) = 0.0;
    d += observer_gain(spec) * (y - x_tilde(0));
    return d;
}

std::vector<std::complex<double>> estimation_error_spectrum(const ObserverSpec& spec) {
    spec.validate();
    auto roots = polynomial_roots(spec.c);
    for (auto& r : roots) r *= spec.h;
    return roots;
}

}  // namespace dooc
