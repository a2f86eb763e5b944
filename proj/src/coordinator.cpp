#include "dooc/coordinator.hpp"

#include "dooc/errors.hpp"

namespace dooc {

void CoordinatorParams::validate() const {
    if (alpha1 <= 0.0 || alpha2 <= 0.0)
        throw ValidationError("coordinator: alpha1 and alpha2 must be positive");
}

CoordinatorState init_state(int n, const Eigen::VectorXd& y_r0) {
    if (n < 1) throw ValidationError("coordinator: n must be >= 1");
    if (y_r0.size() != n) throw ValidationError("coordinator: y_r0 size mismatch");
    CoordinatorState s;
    s.y_r = y_r0;
    s.zeta = Eigen::VectorXd::Zero(n);
    s.xi = Eigen::MatrixXd::Identity(n, n);
    return s;
}

void coordinator_rhs_inplace(Eigen::Ref<const Eigen::VectorXd> y_r,
                             Eigen::Ref<const Eigen::VectorXd> zeta,
                             Eigen::Ref<const Eigen::MatrixXd> xi, const Laplacian& lap,
                             const std::vector<CostFunction>& costs,
                             const CoordinatorParams& params,
                             Eigen::Ref<Eigen::VectorXd> d_y_r,
                             Eigen::Ref<Eigen::VectorXd> d_zeta,
                             Eigen::Ref<Eigen::MatrixXd> d_xi) {
    const auto n = y_r.size();
    if (lap.matrix.rows() != n || static_cast<Eigen::Index>(costs.size()) != n)
        throw ValidationError("coordinator_rhs: dimension mismatch");

    d_zeta.noalias() = lap.matrix * y_r;  // holds the consensus sum until scaled
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi_ii = xi(i, i);
        if (xi_ii <= 0.0)
            throw ValidationError("coordinator_rhs: xi diagonal entry became nonpositive");
        d_y_r(i) = -costs[static_cast<std::size_t>(i)].gradient(y_r(i)) / xi_ii -
                   params.alpha1 * d_zeta(i) - params.alpha2 * zeta(i);
    }
    d_zeta *= params.alpha1;
    d_xi.noalias() = -(lap.matrix * xi);
}

CoordinatorState coordinator_rhs(const CoordinatorState& state, const Laplacian& lap,
                                 const std::vector<CostFunction>& costs,
                                 const CoordinatorParams& params) {
    const auto n = state.y_r.size();
    CoordinatorState d;
    d.y_r.resize(n);
    d.zeta.resize(n);
    d.xi.resize(n, n);
    coordinator_rhs_inplace(state.y_r, state.zeta, state.xi, lap, costs, params, d.y_r,
                            d.zeta, d.xi);
    return d;
}

}  // namespace dooc
