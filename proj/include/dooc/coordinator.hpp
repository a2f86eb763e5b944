#pragma once

#include "dooc/cost.hpp"
#include "dooc/graph.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dooc {

struct CoordinatorParams {
    double alpha1 = 1.0;  // consensus gain
    double alpha2 = 1.0;  // integral gain

    void validate() const;
};

/// State of the distributed optimal coordinator for the whole network.
/// Row i of `xi` is agent i's balancing vector; xi(i, i) stays positive and
/// every row sums to one along the flow.
struct CoordinatorState {
    Eigen::VectorXd y_r;
    Eigen::VectorXd zeta;
    Eigen::MatrixXd xi;
};

/// zeta = 0, xi = I, y_r = y_r0.
CoordinatorState init_state(int n, const Eigen::VectorXd& y_r0);

/// Time derivative of the coordinator flow:
///   d(y_r)_i = -grad c_i(y_r_i) / xi_ii - alpha1 (L y_r)_i - alpha2 zeta_i
///   d(zeta)_i = alpha1 (L y_r)_i
///   d(xi)    = -L xi
/// Pure; throws ValidationError if any xi_ii <= 0 (signals integration failure).
CoordinatorState coordinator_rhs(const CoordinatorState& state, const Laplacian& lap,
                                 const std::vector<CostFunction>& costs,
                                 const CoordinatorParams& params);

/// Allocation-free core of coordinator_rhs, writing into caller buffers.
/// The standalone flow and the closed-loop simulator both run through this.
void coordinator_rhs_inplace(Eigen::Ref<const Eigen::VectorXd> y_r,
                             Eigen::Ref<const Eigen::VectorXd> zeta,
                             Eigen::Ref<const Eigen::MatrixXd> xi, const Laplacian& lap,
                             const std::vector<CostFunction>& costs,
                             const CoordinatorParams& params,
                             Eigen::Ref<Eigen::VectorXd> d_y_r,
                             Eigen::Ref<Eigen::VectorXd> d_zeta,
                             Eigen::Ref<Eigen::MatrixXd> d_xi);

}  // namespace dooc
