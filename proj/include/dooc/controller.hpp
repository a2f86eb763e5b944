#pragma once

#include "dooc/regulator.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dooc {

enum class ControlMode {
    OutputFeedback,   // saturated feedback from observer estimates
    StateFeedback,    // unsaturated feedback from true states (reference mode)
    CoordinatorOnly,  // plants disabled
};

struct ControllerGains {
    double K = 1.0;       // feedback gain
    double delta = 1.0;   // saturation bound
    double g = 1.0;       // composite-variable gain
    Eigen::VectorXd gamma;  // gamma_1..gamma_{n-1}, Hurwitz chain coefficients
};

/// Clip r to [-delta, delta].
template <typename Scalar>
Scalar saturate(Scalar r, Scalar delta) {
    if (r > delta) return delta;
    if (r < -delta) return -delta;
    return r;
}

/// Composite tracking variable
///   x_n + g gamma_{n-1} x_{n-1} + ... + g^(n-2) gamma_2 x_2
///       + g^(n-1) gamma_1 (x_1 - y_r)
/// evaluated on observer estimates (output feedback) or true states (state
/// feedback); the two uses share this one formula.
double theta_tilde(const Eigen::VectorXd& x, double y_r, double g, const Eigen::VectorXd& gamma);

/// u = -saturate(K theta, delta) + Gamma T^{-1} eta.
double control_output(double theta, const Eigen::VectorXd& eta, const RegulatorSpec& spec,
                      const ControllerGains& gains);

/// u_bar = -K theta (no saturation; simulation-only reference mode).
double state_feedback_output(double theta, const ControllerGains& gains);

struct GainValidationReport {
    bool ok = true;
    std::vector<std::string> issues;
    double gamma_max_real = 0.0;  // largest real part over gamma-polynomial roots
    double c_max_real = 0.0;      // same for the observer polynomial
};

/// Hurwitz screens for the gamma- and c-polynomials plus positivity of K, g,
/// delta. A failed report must stop a run before it starts.
GainValidationReport validate_gains(const Eigen::VectorXd& gamma, const Eigen::VectorXd& c,
                                    double K, double g, double delta);

}  // namespace dooc
