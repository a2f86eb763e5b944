#include "dooc/controller.hpp"

#include "dooc/polynomial.hpp"

#include <cmath>

namespace dooc {

double theta_tilde(const Eigen::VectorXd& x, double y_r, double g, const Eigen::VectorXd& gamma) {
    const auto n = x.size();
    if (n == 1) return x(0) - y_r;

    double value = x(n - 1);
    double gk = 1.0;
    // k runs down the chain: weight g^(n-k) on x_k for k = n-1..2.
    for (Eigen::Index k = n - 1; k >= 2; --k) {
        gk *= g;
        value += gk * gamma(k - 1) * x(k - 1);
    }
    gk *= g;
    value += gk * gamma(0) * (x(0) - y_r);
    return value;
}

double control_output(double theta, const Eigen::VectorXd& eta, const RegulatorSpec& spec,
                      const ControllerGains& gains) {
    return -saturate(gains.K * theta, gains.delta) + spec.Gamma_T_inv.dot(eta);
}

double state_feedback_output(double theta, const ControllerGains& gains) {
    return -gains.K * theta;
}

GainValidationReport validate_gains(const Eigen::VectorXd& gamma, const Eigen::VectorXd& c,
                                    double K, double g, double delta) {
    GainValidationReport report;
    const auto flag = [&report](const std::string& issue) {
        report.ok = false;
        report.issues.push_back(issue);
    };

    if (K <= 0.0) flag("K must be positive");
    if (g <= 0.0) flag("g must be positive");
    if (delta <= 0.0) flag("delta must be positive");

    if (gamma.size() > 0) {
        report.gamma_max_real = max_real_part(polynomial_roots(gamma));
        if (!is_hurwitz(gamma)) flag("gamma polynomial is not Hurwitz");
    }
    if (c.size() > 0) {
        report.c_max_real = max_real_part(polynomial_roots(c));
        if (!is_hurwitz(c)) flag("observer coefficient polynomial is not Hurwitz");
    }
    return report;
}

}  // namespace dooc
