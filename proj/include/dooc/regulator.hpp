#pragma once

#include "dooc/plant.hpp"

#include <Eigen/Dense>

namespace dooc {

/// Internal-model data for one agent. Phi is the companion matrix of the
/// disturbance-mode polynomial, (M, N) a controllable Hurwitz pair of the
/// same order, and T the nonsingular solution of T Phi - M T = N Gamma.
struct RegulatorSpec {
    int order = 0;
    Eigen::MatrixXd Phi;
    Eigen::RowVectorXd Gamma;
    Eigen::MatrixXd M;
    Eigen::VectorXd N;
    Eigen::MatrixXd T;
    Eigen::RowVectorXd Gamma_T_inv;  // Gamma * T^{-1}, precomputed
    double sylvester_residual = 0.0;
    double t_min_singular = 0.0;
    double t_condition = 0.0;
};

/// Companion form from the coefficient list ell_1..ell_s of
///   d^s u / dt^s = ell_1 u + ell_2 u' + ... + ell_s u^(s-1).
/// The polynomial sigma^s - ell_s sigma^(s-1) - ... - ell_1 must have
/// distinct roots with zero real parts.
std::pair<Eigen::MatrixXd, Eigen::RowVectorXd> build_phi_gamma(int order,
                                                               const Eigen::VectorXd& ell);

/// Dense Kronecker-vectorization solve of T Phi - M T = N Gamma. Requires
/// disjoint spectra of Phi and M; reports the Frobenius residual and the
/// conditioning of T.
Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& M,
                                const Eigen::VectorXd& N, const Eigen::RowVectorXd& Gamma);

/// eta' = M eta + N u.
Eigen::VectorXd regulator_rhs(const RegulatorSpec& spec, const Eigen::VectorXd& eta, double u);

/// Steady-state feedforward input at output s_star under disturbance state v:
///   second-order family: -Aw2 v2 / b
///   third-order family:  -(p3 s*^3 + Aw3 v1) / b
double feedforward_oracle(const AgentPlant& plant, double s_star, const Eigen::VectorXd& v);

/// Feedforward and its time derivatives up to the internal-model order,
/// col(u*, du*/dt, ...). Used to seed eta = T tau in steady-state checks.
Eigen::VectorXd feedforward_derivatives(const AgentPlant& plant, double s_star,
                                        const Eigen::VectorXd& v, double theta);

/// Coefficients ell for the built-in families, derived from the disturbance
/// frequency: order 2 with (-theta^2, 0), order 3 with (0, -theta^2, 0).
Eigen::VectorXd ell_coefficients(PlantFamily family, double theta);

/// Stock (M, N) pairs sized for each family's internal-model order.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> default_internal_model_pair(PlantFamily family);

/// Full construction for one agent: Phi/Gamma from theta, (M, N) given or
/// defaulted, Sylvester solve, disjoint-spectra and controllability checks.
RegulatorSpec build_regulator(const AgentPlant& plant, double theta,
                              const Eigen::MatrixXd* M_override = nullptr,
                              const Eigen::VectorXd* N_override = nullptr);

bool is_controllable(const Eigen::MatrixXd& M, const Eigen::VectorXd& N);

}  // namespace dooc
