#pragma once

#include "dooc/controller.hpp"
#include "dooc/coordinator.hpp"
#include "dooc/cost.hpp"
#include "dooc/graph.hpp"
#include "dooc/observer.hpp"
#include "dooc/plant.hpp"
#include "dooc/regulator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dooc {

struct IntegrationConfig {
    double dt = 1e-4;
    double t_final = 100.0;
    int record_stride = 100;
};

struct ObserverConfig {
    double h = 100.0;
    bool binomial = true;                    // default pole placement at -1 before h-scaling
    std::vector<Eigen::VectorXd> c_per_agent;  // used when !binomial, one entry per agent
};

struct ControllerConfig {
    ControlMode mode = ControlMode::OutputFeedback;
    double K = 1.0;
    double delta = 1.0;
    double g = 1.0;
    bool binomial_gamma = true;
    std::vector<Eigen::VectorXd> gamma_per_agent;  // used when !binomial_gamma
};

struct RegulatorOverride {
    bool present = false;
    Eigen::MatrixXd M;
    Eigen::VectorXd N;
};

/// Complete closed-loop configuration. Uncertainties are resolved (plants
/// carry their final w) before a Scenario reaches the simulator, so a
/// Scenario plus its seed fully determines a trajectory.
struct Scenario {
    std::string name;
    std::uint64_t seed = 0;

    Digraph graph;
    std::vector<CostFunction> costs;
    CoordinatorParams coordinator;
    Eigen::VectorXd y_r0;

    Exosystem exosystem;
    std::vector<AgentPlant> plants;
    std::vector<Eigen::VectorXd> z0;
    std::vector<Eigen::VectorXd> x0;
    std::vector<RegulatorOverride> regulators;

    ObserverConfig observer;
    ControllerConfig controller;
    IntegrationConfig integration;

    bool has_plants() const { return controller.mode != ControlMode::CoordinatorOnly; }
};

struct AgentSeries {
    Eigen::VectorXd y, u, theta, eta_ff;
    Eigen::MatrixXd z, x, x_tilde, eta;  // rows = recorded steps; 0 cols where absent
};

struct Trajectory {
    ControlMode mode = ControlMode::CoordinatorOnly;
    Eigen::VectorXd t;
    Eigen::MatrixXd y_r, zeta, xi_diag, xi_rowsum;  // rows = recorded steps, cols = agents
    Eigen::MatrixXd v;                              // 0 cols in coordinator-only runs
    std::vector<AgentSeries> agents;
};

/// Classical fourth-order Runge-Kutta update of a flat state vector.
template <typename Rhs>
Eigen::VectorXd rk4_step(const Rhs& rhs, const Eigen::VectorXd& state, double dt) {
    const Eigen::VectorXd k1 = rhs(state);
    const Eigen::VectorXd k2 = rhs(state + (0.5 * dt) * k1);
    const Eigen::VectorXd k3 = rhs(state + (0.5 * dt) * k2);
    const Eigen::VectorXd k4 = rhs(state + dt * k3);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// All invariant violations found in a scenario; empty means runnable.
std::vector<std::string> validate_scenario(const Scenario& scn);

/// Integrate the full network. Throws ValidationError if validate_scenario
/// is nonempty and DivergenceError on the first non-finite value.
Trajectory run(const Scenario& scn);

struct AgentMetrics {
    double final_error = 0.0;
    double settling_time = 0.0;  // entry time into the +-0.05 band; NaN if never
    double sup_u = 0.0;
    double im_residual_sup = 0.0;  // sup |Gamma T^-1 eta - u*| over the final 20%
    double u_star_sup = 0.0;       // sup |u*| over the same window
    double im_residual_ratio = 0.0;
};

struct MetricsReport {
    double final_error_max = 0.0;  // on y when plants run, on y_r otherwise
    double rate_fit_slope = 0.0;   // slope of log max_i |y_r_i - s*| over the tail
    bool rate_fit_valid = false;
    double xi_rowsum_max_err = 0.0;
    double xi_diag_min = 0.0;
    double xi_final_vs_r_max_err = 0.0;
    std::vector<AgentMetrics> agents;
};

MetricsReport metrics(const Trajectory& traj, const Scenario& scn, double s_star);

}  // namespace dooc
