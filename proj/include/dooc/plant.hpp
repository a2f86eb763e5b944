#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace dooc {

/// Autonomous disturbance generator v' = S v. Neutrally stable: every
/// eigenvalue of S is semi-simple with zero real part.
struct Exosystem {
    Eigen::MatrixXd S;
    Eigen::VectorXd v0;

    /// S = [0, theta; -theta, 0] so that v = (sin(theta t), cos(theta t))
    /// from v0 = (0, 1).
    static Exosystem harmonic(double theta);

    /// Rotation rate of the 2x2 harmonic form; ValidationError otherwise.
    double theta() const;

    void validate() const;
};

Eigen::VectorXd exosystem_rhs(const Exosystem& exo, const Eigen::VectorXd& v);

enum class PlantFamily {
    SecondOrderZeroDyn,  // chain of 2 plus scalar internal state
    ThirdOrderChain,     // chain of 3 with cubic output nonlinearity
    Custom,
};

/// Normal-form agent dynamics with parametric uncertainty (p = p_nominal + w)
/// and exosystem-driven sinusoidal disturbances of base amplitude A scaled
/// per channel by mu_k = 1 + 0.1 k.
///
/// SecondOrderZeroDyn (state z, x1, x2):
///   z'  = p1 z + x1 + 1.1 A v1
///   x1' = x2
///   x2' = p2 z x1 x2 + p3 x2 + 1.2 A v2 + b u
/// ThirdOrderChain (state x1, x2, x3):
///   x1' = x2, x2' = x3
///   x3' = p1 x3 + p2 x2 + p3 x1^3 + 1.3 A v1 + b u
struct AgentPlant {
    PlantFamily family = PlantFamily::ThirdOrderChain;
    int n_chain = 3;  // integrator-chain length (relative degree)
    int n_zero = 0;   // zero-dynamics dimension

    Eigen::Vector3d p_nominal = Eigen::Vector3d::Zero();
    Eigen::Vector3d w = Eigen::Vector3d::Zero();
    double b = 1.0;
    double dist_amplitude = 0.0;  // A
    double z_star_s_coeff = 0.0;  // diagnostic offset of the zero-dynamics manifold, per unit s

    // Extension point for user-defined dynamics; built-in families ignore it.
    // Signature: (z, x, u, v, dz_out, dx_out).
    std::function<void(const Eigen::VectorXd&, const Eigen::VectorXd&, double,
                       const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::VectorXd&)>
        custom_rhs;

    static AgentPlant second_order_zero_dyn(const Eigen::Vector3d& p_nominal,
                                            const Eigen::Vector3d& w, double b,
                                            double dist_amplitude);
    static AgentPlant third_order_chain(const Eigen::Vector3d& p_nominal,
                                        const Eigen::Vector3d& w, double b,
                                        double dist_amplitude);

    Eigen::Vector3d p() const { return p_nominal + w; }

    void validate() const;
};

double disturbance_gain(const AgentPlant& plant, int channel);  // mu_k * A

struct PlantDerivative {
    Eigen::VectorXd dz;
    Eigen::VectorXd dx;
};

PlantDerivative plant_rhs(const AgentPlant& plant, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& x, double u, const Eigen::VectorXd& v);

/// Steady zero-dynamics locus z*(s, v) for SecondOrderZeroDyn:
///   z* = -(p1 Aw1 / (p1^2 + theta^2)) v1 - (theta Aw1 / (p1^2 + theta^2)) v2
///        + z_star_s_coeff * s
/// Diagnostic only; ValidationError for other families.
double zero_dynamics_manifold(const AgentPlant& plant, double s, const Eigen::VectorXd& v,
                              double theta);

/// Deterministic per-agent uncertainty draw: p1 = p_nominal1 + w1 lands in
/// [-2, -0.1], w2 and w3 in [-0.2, 0.2]. Same (seed, index, p_nominal)
/// always produces the same w.
Eigen::Vector3d sample_uncertainty(std::uint64_t seed, int agent_index,
                                   const Eigen::Vector3d& p_nominal);

/// Offset making p1 exactly -1 with w2 = w3 = 0 (zero-uncertainty mode).
Eigen::Vector3d zero_uncertainty(const Eigen::Vector3d& p_nominal);

}  // namespace dooc
