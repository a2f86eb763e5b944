#include "dooc/plant.hpp"

#include "dooc/errors.hpp"
#include "dooc/rng.hpp"

#include <cmath>

namespace dooc {

Exosystem Exosystem::harmonic(double theta) {
    Exosystem exo;
    exo.S.resize(2, 2);
    exo.S << 0.0, theta, -theta, 0.0;
    exo.v0.resize(2);
    exo.v0 << 0.0, 1.0;
    return exo;
}

double Exosystem::theta() const {
    if (S.rows() != 2 || S.cols() != 2 || S(0, 0) != 0.0 || S(1, 1) != 0.0 || S(0, 1) != -S(1, 0))
        throw ValidationError("exosystem: not in 2x2 harmonic form, theta undefined");
    return S(0, 1);
}

void Exosystem::validate() const {
    if (S.rows() != S.cols() || S.rows() < 1) throw ValidationError("exosystem: S must be square");
    if (v0.size() != S.rows()) throw ValidationError("exosystem: v0 size mismatch");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(S);
    if ((solver.eigenvalues().real().array().abs() > 1e-9).any())
        throw ValidationError("exosystem: S has eigenvalues off the imaginary axis");
    // Semi-simplicity: the eigenvector matrix must be well conditioned.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(solver.eigenvectors());
    const auto& sigma = svd.singularValues();
    if (sigma(sigma.size() - 1) < 1e-9 * sigma(0))
        throw ValidationError("exosystem: S has a defective (non-semi-simple) eigenvalue");
}

Eigen::VectorXd exosystem_rhs(const Exosystem& exo, const Eigen::VectorXd& v) {
    return exo.S * v;
}

AgentPlant AgentPlant::second_order_zero_dyn(const Eigen::Vector3d& p_nominal,
                                             const Eigen::Vector3d& w, double b,
                                             double dist_amplitude) {
    AgentPlant plant;
    plant.family = PlantFamily::SecondOrderZeroDyn;
    plant.n_chain = 2;
    plant.n_zero = 1;
    plant.p_nominal = p_nominal;
    plant.w = w;
    plant.b = b;
    plant.dist_amplitude = dist_amplitude;
    plant.validate();
    return plant;
}

AgentPlant AgentPlant::third_order_chain(const Eigen::Vector3d& p_nominal,
                                         const Eigen::Vector3d& w, double b,
                                         double dist_amplitude) {
    AgentPlant plant;
    plant.family = PlantFamily::ThirdOrderChain;
    plant.n_chain = 3;
    plant.n_zero = 0;
    plant.p_nominal = p_nominal;
    plant.w = w;
    plant.b = b;
    plant.dist_amplitude = dist_amplitude;
    plant.validate();
    return plant;
}

void AgentPlant::validate() const {
    if (b <= 0.0) throw ValidationError("plant: input coefficient b must be positive");
    switch (family) {
        case PlantFamily::SecondOrderZeroDyn:
            if (n_chain != 2 || n_zero != 1)
                throw ValidationError("plant: second-order family needs n_chain=2, n_zero=1");
            if (p()(0) >= 0.0)
                throw ValidationError("plant: p1 must be negative (stable zero dynamics)");
            break;
        case PlantFamily::ThirdOrderChain:
            if (n_chain != 3 || n_zero != 0)
                throw ValidationError("plant: third-order family needs n_chain=3, n_zero=0");
            break;
        case PlantFamily::Custom:
            if (!custom_rhs) throw ValidationError("plant: custom family needs custom_rhs");
            if (n_chain < 1 || n_zero < 0)
                throw ValidationError("plant: custom family dimensions invalid");
            break;
    }
}

double disturbance_gain(const AgentPlant& plant, int channel) {
    return (1.0 + 0.1 * static_cast<double>(channel)) * plant.dist_amplitude;
}

PlantDerivative plant_rhs(const AgentPlant& plant, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& x, double u, const Eigen::VectorXd& v) {
    PlantDerivative d;
    const Eigen::Vector3d p = plant.p();
    switch (plant.family) {
        case PlantFamily::SecondOrderZeroDyn: {
            d.dz.resize(1);
            d.dx.resize(2);
            d.dz(0) = p(0) * z(0) + x(0) + disturbance_gain(plant, 1) * v(0);
            d.dx(0) = x(1);
            d.dx(1) = p(1) * z(0) * x(0) * x(1) + p(2) * x(1) +
                      disturbance_gain(plant, 2) * v(1) + plant.b * u;
            break;
        }
        case PlantFamily::ThirdOrderChain: {
            d.dz.resize(0);
            d.dx.resize(3);
            d.dx(0) = x(1);
            d.dx(1) = x(2);
            d.dx(2) = p(0) * x(2) + p(1) * x(1) + p(2) * x(0) * x(0) * x(0) +
                      disturbance_gain(plant, 3) * v(0) + plant.b * u;
            break;
        }
        case PlantFamily::Custom: {
            d.dz.resize(plant.n_zero);
            d.dx.resize(plant.n_chain);
            plant.custom_rhs(z, x, u, v, d.dz, d.dx);
            break;
        }
    }
    return d;
}

double zero_dynamics_manifold(const AgentPlant& plant, double s, const Eigen::VectorXd& v,
                              double theta) {
    if (plant.family != PlantFamily::SecondOrderZeroDyn)
        throw ValidationError("zero_dynamics_manifold: only defined for the second-order family");
    const double p1 = plant.p()(0);
    const double aw1 = disturbance_gain(plant, 1);
    const double denom = p1 * p1 + theta * theta;
    return -(p1 * aw1 / denom) * v(0) - (theta * aw1 / denom) * v(1) + plant.z_star_s_coeff * s;
}

Eigen::Vector3d sample_uncertainty(std::uint64_t seed, int agent_index,
                                   const Eigen::Vector3d& p_nominal) {
    SmallRng rng(sub_seed(seed, static_cast<std::uint64_t>(agent_index)));
    Eigen::Vector3d w;
    w(0) = rng.uniform(-2.0, -0.1) - p_nominal(0);
    w(1) = rng.uniform(-0.2, 0.2);
    w(2) = rng.uniform(-0.2, 0.2);
    return w;
}

Eigen::Vector3d zero_uncertainty(const Eigen::Vector3d& p_nominal) {
    return {-1.0 - p_nominal(0), 0.0, 0.0};
}

}  // namespace dooc
