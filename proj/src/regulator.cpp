#include "dooc/regulator.hpp"

#include "dooc/errors.hpp"
#include "dooc/polynomial.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace dooc {

std::pair<Eigen::MatrixXd, Eigen::RowVectorXd> build_phi_gamma(int order,
                                                               const Eigen::VectorXd& ell) {
    if (order < 1 || ell.size() != order)
        throw ValidationError("build_phi_gamma: order/coefficient mismatch");

    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(order, order);
    if (order > 1) phi.topRightCorner(order - 1, order - 1).setIdentity();
    phi.row(order - 1) = ell.transpose();

    // Characteristic polynomial sigma^s - ell_s sigma^(s-1) - ... - ell_1.
    const std::vector<std::complex<double>> roots = polynomial_roots(-ell);
    for (const auto& r : roots) {
        if (std::abs(r.real()) > 1e-9)
            throw ValidationError("build_phi_gamma: disturbance-mode root off the imaginary axis");
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (std::abs(roots[i] - roots[j]) < 1e-9)
                throw ValidationError("build_phi_gamma: repeated disturbance-mode root");
        }
    }

    Eigen::RowVectorXd gamma = Eigen::RowVectorXd::Zero(order);
    gamma(0) = 1.0;
    return {phi, gamma};
}

namespace {

void require_disjoint_spectra(const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> phi_eig(Phi, false);
    Eigen::EigenSolver<Eigen::MatrixXd> m_eig(M, false);
    for (Eigen::Index i = 0; i < Phi.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.rows(); ++j) {
            if (std::abs(phi_eig.eigenvalues()(i) - m_eig.eigenvalues()(j)) < 1e-9)
                throw ValidationError(
                    "solve_sylvester: Phi and M share an eigenvalue, no unique solution");
        }
    }
}

}  // namespace

Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& M,
                                const Eigen::VectorXd& N, const Eigen::RowVectorXd& Gamma) {
    const Eigen::Index s = Phi.rows();
    if (Phi.cols() != s || M.rows() != s || M.cols() != s || N.size() != s || Gamma.size() != s)
        throw ValidationError("solve_sylvester: dimension mismatch");
    require_disjoint_spectra(Phi, M);

    // vec(T Phi - M T) = (Phi^T (x) I - I (x) M) vec(T), column-major stacking.
    const Eigen::Index s2 = s * s;
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(s2, s2);
    for (Eigen::Index col = 0; col < s; ++col) {
        for (Eigen::Index row = 0; row < s; ++row) {
            // Block (col, row) of Phi^T (x) I is Phi(row, col) * I.
            system.block(col * s, row * s, s, s) =
                Phi(row, col) * Eigen::MatrixXd::Identity(s, s);
        }
        system.block(col * s, col * s, s, s) -= M;
    }
    const Eigen::MatrixXd rhs_mat = N * Gamma;
    const Eigen::VectorXd vec_rhs = Eigen::Map<const Eigen::VectorXd>(rhs_mat.data(), s2);
    const Eigen::VectorXd vec_t = system.fullPivLu().solve(vec_rhs);
    return Eigen::Map<const Eigen::MatrixXd>(vec_t.data(), s, s);
}

Eigen::VectorXd regulator_rhs(const RegulatorSpec& spec, const Eigen::VectorXd& eta, double u) {
    return spec.M * eta + spec.N * u;
}

double feedforward_oracle(const AgentPlant& plant, double s_star, const Eigen::VectorXd& v) {
    const Eigen::Vector3d p = plant.p();
    switch (plant.family) {
        case PlantFamily::SecondOrderZeroDyn:
            return -disturbance_gain(plant, 2) * v(1) / plant.b;
        case PlantFamily::ThirdOrderChain:
            return -(p(2) * s_star * s_star * s_star + disturbance_gain(plant, 3) * v(0)) /
                   plant.b;
        case PlantFamily::Custom:
            throw ValidationError("feedforward_oracle: not available for custom families");
    }
    throw ValidationError("feedforward_oracle: unknown family");
}

Eigen::VectorXd feedforward_derivatives(const AgentPlant& plant, double s_star,
                                        const Eigen::VectorXd& v, double theta) {
    const Eigen::Vector3d p = plant.p();
    switch (plant.family) {
        case PlantFamily::SecondOrderZeroDyn: {
            // u* = -Aw2 v2 / b; v1' = theta v2, v2' = -theta v1.
            const double aw2 = disturbance_gain(plant, 2);
            Eigen::VectorXd tau(2);
            tau(0) = -aw2 * v(1) / plant.b;
            tau(1) = aw2 * theta * v(0) / plant.b;
            return tau;
        }
        case PlantFamily::ThirdOrderChain: {
            const double aw3 = disturbance_gain(plant, 3);
            Eigen::VectorXd tau(3);
            tau(0) = -(p(2) * s_star * s_star * s_star + aw3 * v(0)) / plant.b;
            tau(1) = -aw3 * theta * v(1) / plant.b;
            tau(2) = aw3 * theta * theta * v(0) / plant.b;
            return tau;
        }
        case PlantFamily::Custom:
            throw ValidationError("feedforward_derivatives: not available for custom families");
    }
    throw ValidationError("feedforward_derivatives: unknown family");
}

Eigen::VectorXd ell_coefficients(PlantFamily family, double theta) {
    switch (family) {
        case PlantFamily::SecondOrderZeroDyn: {
            Eigen::VectorXd ell(2);
            ell << -theta * theta, 0.0;
            return ell;
        }
        case PlantFamily::ThirdOrderChain: {
            Eigen::VectorXd ell(3);
            ell << 0.0, -theta * theta, 0.0;
            return ell;
        }
        case PlantFamily::Custom:
            throw ValidationError(
                "ell_coefficients: custom families must supply coefficients explicitly");
    }
    throw ValidationError("ell_coefficients: unknown family");
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> default_internal_model_pair(PlantFamily family) {
    switch (family) {
        case PlantFamily::SecondOrderZeroDyn: {
            Eigen::MatrixXd m(2, 2);
            m << 0.0, 1.0, -2.0, -3.0;
            Eigen::VectorXd n(2);
            n << 0.0, 1.0;
            return {m, n};
        }
        case PlantFamily::ThirdOrderChain: {
            Eigen::MatrixXd m(3, 3);
            m << -3.0, -7.0, -5.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
            Eigen::VectorXd n(3);
            n << 1.0, 0.0, 0.0;
            return {m, n};
        }
        case PlantFamily::Custom:
            throw ValidationError("default_internal_model_pair: none for custom families");
    }
    throw ValidationError("default_internal_model_pair: unknown family");
}

bool is_controllable(const Eigen::MatrixXd& M, const Eigen::VectorXd& N) {
    const Eigen::Index s = M.rows();
    Eigen::MatrixXd ctrb(s, s);
    Eigen::VectorXd column = N;
    for (Eigen::Index k = 0; k < s; ++k) {
        ctrb.col(k) = column;
        column = M * column;
    }
    return ctrb.fullPivLu().rank() == s;
}

RegulatorSpec build_regulator(const AgentPlant& plant, double theta,
                              const Eigen::MatrixXd* M_override,
                              const Eigen::VectorXd* N_override) {
    const Eigen::VectorXd ell = ell_coefficients(plant.family, theta);
    RegulatorSpec spec;
    spec.order = static_cast<int>(ell.size());
    std::tie(spec.Phi, spec.Gamma) = build_phi_gamma(spec.order, ell);

    if ((M_override == nullptr) != (N_override == nullptr))
        throw ValidationError("build_regulator: M and N must be overridden together");
    if (M_override != nullptr) {
        spec.M = *M_override;
        spec.N = *N_override;
    } else {
        std::tie(spec.M, spec.N) = default_internal_model_pair(plant.family);
    }
    if (spec.M.rows() != spec.order || spec.M.cols() != spec.order ||
        spec.N.size() != spec.order)
        throw ValidationError("build_regulator: (M, N) size does not match internal-model order");

    Eigen::EigenSolver<Eigen::MatrixXd> m_eig(spec.M, false);
    if ((m_eig.eigenvalues().real().array() >= 0.0).any())
        throw ValidationError("build_regulator: M is not Hurwitz");
    if (!is_controllable(spec.M, spec.N))
        throw ValidationError("build_regulator: (M, N) is not controllable");

    spec.T = solve_sylvester(spec.Phi, spec.M, spec.N, spec.Gamma);
    spec.sylvester_residual =
        (spec.T * spec.Phi - spec.M * spec.T - spec.N * spec.Gamma).norm();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(spec.T);
    spec.t_min_singular = svd.singularValues()(spec.order - 1);
    if (spec.t_min_singular <= 0.0)
        throw ValidationError("build_regulator: Sylvester solution T is singular");
    spec.t_condition = svd.singularValues()(0) / spec.t_min_singular;

    spec.Gamma_T_inv = spec.Gamma * spec.T.inverse();
    return spec;
}

}  // namespace dooc
