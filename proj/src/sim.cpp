#include "dooc/sim.hpp"

#include "dooc/errors.hpp"
#include "dooc/polynomial.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dooc {

namespace {

struct AgentLayout {
    int z = -1, x = -1, eta = -1, xt = -1;
    int nz = 0, nx = 0, ns = 0;
};

// Scenario resolved into everything the right-hand side needs.
struct SimModel {
    Laplacian lap;
    ControlMode mode = ControlMode::CoordinatorOnly;
    ControllerGains gains;
    std::vector<Eigen::VectorXd> gamma;
    std::vector<ObserverSpec> observers;
    std::vector<RegulatorSpec> regulators;

    int n = 0;
    int y_r_off = 0, zeta_off = 0, xi_off = 0, v_off = -1;
    int n_v = 0;
    std::vector<AgentLayout> agents;
    int dim = 0;
};

// Xi lives in the flat state column-major, matching Eigen's default so the
// coordinator core can bind it without copies.
using XiMap = Eigen::Map<const Eigen::MatrixXd>;
using XiMutMap = Eigen::Map<Eigen::MatrixXd>;

SimModel build_model(const Scenario& scn) {
    SimModel model;
    model.n = scn.graph.n;
    model.lap = laplacian(scn.graph);
    model.mode = scn.controller.mode;

    model.y_r_off = 0;
    model.zeta_off = model.n;
    model.xi_off = 2 * model.n;
    int offset = 2 * model.n + model.n * model.n;

    if (scn.has_plants()) {
        model.gains.K = scn.controller.K;
        model.gains.delta = scn.controller.delta;
        model.gains.g = scn.controller.g;

        model.n_v = static_cast<int>(scn.exosystem.v0.size());
        model.v_off = offset;
        offset += model.n_v;

        if (static_cast<int>(scn.plants.size()) != model.n)
            throw ValidationError("plants: need one plant per agent");
        if (!scn.observer.binomial &&
            scn.observer.c_per_agent.size() != scn.plants.size())
            throw ValidationError("observer: need one coefficient list per agent");
        if (!scn.controller.binomial_gamma &&
            scn.controller.gamma_per_agent.size() != scn.plants.size())
            throw ValidationError("controller: need one gamma list per agent");

        const double theta = scn.exosystem.theta();
        for (int i = 0; i < model.n; ++i) {
            const auto& plant = scn.plants[static_cast<std::size_t>(i)];

            AgentLayout layout;
            layout.nz = plant.n_zero;
            layout.nx = plant.n_chain;

            const RegulatorOverride* reg_override =
                static_cast<std::size_t>(i) < scn.regulators.size()
                    ? &scn.regulators[static_cast<std::size_t>(i)]
                    : nullptr;
            RegulatorSpec reg =
                (reg_override != nullptr && reg_override->present)
                    ? build_regulator(plant, theta, &reg_override->M, &reg_override->N)
                    : build_regulator(plant, theta);
            layout.ns = reg.order;
            model.regulators.push_back(std::move(reg));

            layout.z = offset;
            offset += layout.nz;
            layout.x = offset;
            offset += layout.nx;
            layout.eta = offset;
            offset += layout.ns;
            if (model.mode == ControlMode::OutputFeedback) {
                layout.xt = offset;
                offset += layout.nx;
            }
            model.agents.push_back(layout);

            ObserverSpec obs;
            obs.n = plant.n_chain;
            obs.h = scn.observer.h;
            obs.c = scn.observer.binomial ? binomial_coefficients(plant.n_chain)
                                          : scn.observer.c_per_agent[static_cast<std::size_t>(i)];
            obs.validate();
            model.observers.push_back(std::move(obs));

            Eigen::VectorXd gamma =
                scn.controller.binomial_gamma
                    ? (plant.n_chain > 1 ? binomial_coefficients(plant.n_chain - 1)
                                         : Eigen::VectorXd())
                    : scn.controller.gamma_per_agent[static_cast<std::size_t>(i)];
            model.gamma.push_back(std::move(gamma));
        }
    }
    model.dim = offset;
    return model;
}

struct AgentControl {
    double u = 0.0;
    double theta = 0.0;
    double eta_ff = 0.0;
};

AgentControl agent_control(const SimModel& model, const Eigen::VectorXd& state, int i) {
    const AgentLayout& lay = model.agents[static_cast<std::size_t>(i)];
    const RegulatorSpec& reg = model.regulators[static_cast<std::size_t>(i)];
    const double y_r = state(model.y_r_off + i);
    const Eigen::VectorXd eta = state.segment(lay.eta, lay.ns);

    AgentControl ctl;
    ctl.eta_ff = reg.Gamma_T_inv.dot(eta);
    if (model.mode == ControlMode::OutputFeedback) {
        ctl.theta = theta_tilde(state.segment(lay.xt, lay.nx), y_r, model.gains.g,
                                model.gamma[static_cast<std::size_t>(i)]);
        ctl.u = control_output(ctl.theta, eta, reg, model.gains);
    } else {
        ctl.theta = theta_tilde(state.segment(lay.x, lay.nx), y_r, model.gains.g,
                                model.gamma[static_cast<std::size_t>(i)]);
        ctl.u = state_feedback_output(ctl.theta, model.gains) + ctl.eta_ff;
    }
    return ctl;
}

// Name of the state block containing flat index `idx`, for divergence reports.
std::string block_name(const SimModel& model, Eigen::Index idx) {
    const int i = static_cast<int>(idx);
    if (i < model.zeta_off) return "coordinator.y_r";
    if (i < model.xi_off) return "coordinator.zeta";
    if (i < model.xi_off + model.n * model.n) return "coordinator.xi";
    if (model.v_off >= 0 && i < model.v_off + model.n_v) return "exosystem.v";
    for (std::size_t a = 0; a < model.agents.size(); ++a) {
        const auto& lay = model.agents[a];
        const std::string tag = "agent" + std::to_string(a + 1);
        if (i >= lay.z && i < lay.z + lay.nz) return tag + ".z";
        if (i >= lay.x && i < lay.x + lay.nx) return tag + ".x";
        if (i >= lay.eta && i < lay.eta + lay.ns) return tag + ".eta";
        if (lay.xt >= 0 && i >= lay.xt && i < lay.xt + lay.nx) return tag + ".x_tilde";
    }
    return "state";
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& scn) {
    std::vector<std::string> issues;
    const auto note = [&issues](const std::string& msg) { issues.push_back(msg); };

    try {
        scn.graph.validate();
        if (!is_strongly_connected(scn.graph)) note("graph: not strongly connected");
    } catch (const ValidationError& err) {
        note(err.what());
    }

    if (static_cast<int>(scn.costs.size()) != scn.graph.n)
        note("costs: need one cost per agent");
    if (scn.y_r0.size() != scn.graph.n) note("coordinator: y_r0 needs one entry per agent");
    try {
        scn.coordinator.validate();
    } catch (const ValidationError& err) {
        note(err.what());
    }

    if (scn.integration.dt <= 0.0) note("integration: dt must be positive");
    if (scn.integration.t_final < scn.integration.dt)
        note("integration: t_final must be at least dt");
    if (scn.integration.record_stride < 1) note("integration: record_stride must be >= 1");

    if (scn.has_plants()) {
        if (static_cast<int>(scn.plants.size()) != scn.graph.n)
            note("plants: need one plant per agent");
        if (scn.plants.size() != scn.z0.size() || scn.plants.size() != scn.x0.size())
            note("plants: initial-state lists must match the plant list");
        if (scn.regulators.size() != scn.plants.size())
            note("regulators: override list must match the plant list");
        try {
            scn.exosystem.validate();
        } catch (const ValidationError& err) {
            note(err.what());
        }

        for (std::size_t i = 0; i < scn.plants.size(); ++i) {
            const std::string tag = "agent" + std::to_string(i + 1) + ": ";
            const auto& plant = scn.plants[i];
            try {
                plant.validate();
                if (plant.family == PlantFamily::Custom)
                    note(tag + "custom plant families run through the library API, not scenarios");
                if (i < scn.z0.size() && scn.z0[i].size() != plant.n_zero)
                    note(tag + "z0 size mismatch");
                if (i < scn.x0.size() && scn.x0[i].size() != plant.n_chain)
                    note(tag + "x0 size mismatch");
            } catch (const ValidationError& err) {
                note(tag + err.what());
            }
        }

        // Gain screens, observer polynomials, and the internal-model
        // construction (spectra disjoint, controllability, Sylvester
        // residual) must all pass before a single step is taken.
        try {
            const SimModel model = build_model(scn);
            for (std::size_t i = 0; i < model.observers.size(); ++i) {
                const auto report = validate_gains(model.gamma[i], model.observers[i].c,
                                                   scn.controller.K, scn.controller.g,
                                                   scn.controller.delta);
                if (!report.ok) {
                    for (const auto& issue : report.issues)
                        note("agent" + std::to_string(i + 1) + ": " + issue);
                }
                if (model.regulators[i].sylvester_residual > 1e-10)
                    note("agent" + std::to_string(i + 1) + ": Sylvester residual above 1e-10");
            }
        } catch (const ValidationError& err) {
            note(err.what());
        }
    }
    return issues;
}

Trajectory run(const Scenario& scn) {
    {
        const auto issues = validate_scenario(scn);
        if (!issues.empty()) {
            std::ostringstream joined;
            joined << "scenario validation failed:";
            for (const auto& issue : issues) joined << "\n  - " << issue;
            throw ValidationError(joined.str());
        }
    }

    const SimModel model = build_model(scn);
    const int n = model.n;
    const double dt = scn.integration.dt;
    const auto total_steps =
        static_cast<long long>(std::llround(scn.integration.t_final / dt));

    // Initial state.
    Eigen::VectorXd state = Eigen::VectorXd::Zero(model.dim);
    state.segment(model.y_r_off, n) = scn.y_r0;
    XiMutMap(state.data() + model.xi_off, n, n).setIdentity();
    if (scn.has_plants()) {
        state.segment(model.v_off, model.n_v) = scn.exosystem.v0;
        for (int i = 0; i < n; ++i) {
            const auto& lay = model.agents[static_cast<std::size_t>(i)];
            state.segment(lay.z, lay.nz) = scn.z0[static_cast<std::size_t>(i)];
            state.segment(lay.x, lay.nx) = scn.x0[static_cast<std::size_t>(i)];
            // eta starts at zero; the observer starts from the one measured
            // quantity, which trims the initial peaking versus zero-init.
            if (lay.xt >= 0) state(lay.xt) = state(lay.x);
        }
    }

    double now = 0.0;  // diagnostic time for divergence reports
    const auto rhs = [&model, &scn, &now](const Eigen::VectorXd& s) -> Eigen::VectorXd {
        Eigen::VectorXd d(model.dim);
        const int n = model.n;

        try {
            coordinator_rhs_inplace(s.segment(model.y_r_off, n), s.segment(model.zeta_off, n),
                                    XiMap(s.data() + model.xi_off, n, n), model.lap, scn.costs,
                                    scn.coordinator, d.segment(model.y_r_off, n),
                                    d.segment(model.zeta_off, n),
                                    XiMutMap(d.data() + model.xi_off, n, n));
        } catch (const ValidationError& err) {
            throw DivergenceError(now, "coordinator.xi", err.what());
        }

        if (scn.has_plants()) {
            const Eigen::VectorXd v = s.segment(model.v_off, model.n_v);
            d.segment(model.v_off, model.n_v).noalias() = scn.exosystem.S * v;
            for (int i = 0; i < n; ++i) {
                const auto& lay = model.agents[static_cast<std::size_t>(i)];
                const auto& plant = scn.plants[static_cast<std::size_t>(i)];
                const AgentControl ctl = agent_control(model, s, i);

                const PlantDerivative pd =
                    plant_rhs(plant, s.segment(lay.z, lay.nz), s.segment(lay.x, lay.nx),
                              ctl.u, v);
                d.segment(lay.z, lay.nz) = pd.dz;
                d.segment(lay.x, lay.nx) = pd.dx;
                d.segment(lay.eta, lay.ns) =
                    regulator_rhs(model.regulators[static_cast<std::size_t>(i)],
                                  s.segment(lay.eta, lay.ns), ctl.u);
                if (lay.xt >= 0)
                    d.segment(lay.xt, lay.nx) =
                        observer_rhs(model.observers[static_cast<std::size_t>(i)],
                                     s.segment(lay.xt, lay.nx), s(lay.x));
            }
        }

        if (!d.allFinite()) {
            for (Eigen::Index k = 0; k < d.size(); ++k) {
                if (!std::isfinite(d(k)))
                    throw DivergenceError(now, block_name(model, k),
                                          "non-finite derivative in block " +
                                              block_name(model, k) + " at t=" +
                                              std::to_string(now));
            }
        }
        return d;
    };

    // Recording buffers.
    const int stride = scn.integration.record_stride;
    const auto recorded =
        static_cast<Eigen::Index>(total_steps / stride) + 1 +
        ((total_steps % stride) != 0 ? 1 : 0);
    Trajectory traj;
    traj.mode = model.mode;
    traj.t.resize(recorded);
    traj.y_r.resize(recorded, n);
    traj.zeta.resize(recorded, n);
    traj.xi_diag.resize(recorded, n);
    traj.xi_rowsum.resize(recorded, n);
    traj.v.resize(recorded, scn.has_plants() ? model.n_v : 0);
    if (scn.has_plants()) {
        traj.agents.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto& series = traj.agents[static_cast<std::size_t>(i)];
            const auto& lay = model.agents[static_cast<std::size_t>(i)];
            series.y.resize(recorded);
            series.u.resize(recorded);
            series.theta.resize(recorded);
            series.eta_ff.resize(recorded);
            series.z.resize(recorded, lay.nz);
            series.x.resize(recorded, lay.nx);
            series.x_tilde.resize(recorded, lay.xt >= 0 ? lay.nx : 0);
            series.eta.resize(recorded, lay.ns);
        }
    }

    Eigen::Index row = 0;
    const auto record = [&](double t, const Eigen::VectorXd& s) {
        traj.t(row) = t;
        traj.y_r.row(row) = s.segment(model.y_r_off, n).transpose();
        traj.zeta.row(row) = s.segment(model.zeta_off, n).transpose();
        XiMap xi(s.data() + model.xi_off, n, n);
        traj.xi_diag.row(row) = xi.diagonal().transpose();
        traj.xi_rowsum.row(row) = xi.rowwise().sum().transpose();
        if (scn.has_plants()) {
            traj.v.row(row) = s.segment(model.v_off, model.n_v).transpose();
            for (int i = 0; i < n; ++i) {
                auto& series = traj.agents[static_cast<std::size_t>(i)];
                const auto& lay = model.agents[static_cast<std::size_t>(i)];
                const AgentControl ctl = agent_control(model, s, i);
                series.y(row) = s(lay.x);
                series.u(row) = ctl.u;
                series.theta(row) = ctl.theta;
                series.eta_ff(row) = ctl.eta_ff;
                series.z.row(row) = s.segment(lay.z, lay.nz).transpose();
                series.x.row(row) = s.segment(lay.x, lay.nx).transpose();
                if (lay.xt >= 0)
                    series.x_tilde.row(row) = s.segment(lay.xt, lay.nx).transpose();
                series.eta.row(row) = s.segment(lay.eta, lay.ns).transpose();
            }
        }
        ++row;
    };

    record(0.0, state);
    for (long long step = 1; step <= total_steps; ++step) {
        now = static_cast<double>(step - 1) * dt;
        state = rk4_step(rhs, state, dt);
        const double t = static_cast<double>(step) * dt;
        if (!state.allFinite()) {
            for (Eigen::Index k = 0; k < state.size(); ++k) {
                if (!std::isfinite(state(k)))
                    throw DivergenceError(t, block_name(model, k),
                                          "non-finite state in block " + block_name(model, k) +
                                              " at t=" + std::to_string(t));
            }
        }
        if (step % stride == 0 || step == total_steps) record(t, state);
    }
    // Trim in case the final step coincided with a stride boundary.
    const Eigen::Index rows = row;
    traj.t.conservativeResize(rows);
    traj.y_r.conservativeResize(rows, Eigen::NoChange);
    traj.zeta.conservativeResize(rows, Eigen::NoChange);
    traj.xi_diag.conservativeResize(rows, Eigen::NoChange);
    traj.xi_rowsum.conservativeResize(rows, Eigen::NoChange);
    traj.v.conservativeResize(rows, Eigen::NoChange);
    for (auto& series : traj.agents) {
        series.y.conservativeResize(rows);
        series.u.conservativeResize(rows);
        series.theta.conservativeResize(rows);
        series.eta_ff.conservativeResize(rows);
        series.z.conservativeResize(rows, Eigen::NoChange);
        series.x.conservativeResize(rows, Eigen::NoChange);
        series.x_tilde.conservativeResize(rows, Eigen::NoChange);
        series.eta.conservativeResize(rows, Eigen::NoChange);
    }
    return traj;
}

MetricsReport metrics(const Trajectory& traj, const Scenario& scn, double s_star) {
    MetricsReport report;
    const Eigen::Index rows = traj.t.size();
    const Eigen::Index last = rows - 1;
    const int n = static_cast<int>(traj.y_r.cols());
    const bool closed_loop = !traj.agents.empty();

    // Coordinator diagnostics.
    report.xi_rowsum_max_err = (traj.xi_rowsum.array() - 1.0).abs().maxCoeff();
    report.xi_diag_min = traj.xi_diag.minCoeff();
    const Eigen::VectorXd r = left_eigenvector(laplacian(scn.graph));
    report.xi_final_vs_r_max_err =
        (traj.xi_diag.row(last).transpose() - r).cwiseAbs().maxCoeff();

    // Exponential-rate fit of log max_i |y_r_i - s*| over the tail,
    // truncated where the error reaches the floating noise floor.
    {
        const double t_final = traj.t(last);
        std::vector<double> ts, logs;
        for (Eigen::Index k = 0; k < rows; ++k) {
            if (traj.t(k) < 0.1 * t_final) continue;
            const double err = (traj.y_r.row(k).array() - s_star).abs().maxCoeff();
            if (err < 1e-12) break;
            ts.push_back(traj.t(k));
            logs.push_back(std::log(err));
        }
        if (ts.size() >= 8) {
            double mt = 0.0, ml = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                mt += ts[k];
                ml += logs[k];
            }
            mt /= static_cast<double>(ts.size());
            ml /= static_cast<double>(ts.size());
            double cov = 0.0, var = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                cov += (ts[k] - mt) * (logs[k] - ml);
                var += (ts[k] - mt) * (ts[k] - mt);
            }
            if (var > 0.0) {
                report.rate_fit_slope = cov / var;
                report.rate_fit_valid = true;
            }
        }
    }

    report.agents.resize(static_cast<std::size_t>(n));
    report.final_error_max = 0.0;
    const double band = 0.05;
    const double window_start = 0.8 * traj.t(last);
    for (int i = 0; i < n; ++i) {
        auto& am = report.agents[static_cast<std::size_t>(i)];
        const auto output = [&](Eigen::Index k) {
            return closed_loop ? traj.agents[static_cast<std::size_t>(i)].y(k)
                               : traj.y_r(k, i);
        };
        am.final_error = std::abs(output(last) - s_star);
        report.final_error_max = std::max(report.final_error_max, am.final_error);

        am.settling_time = std::numeric_limits<double>::quiet_NaN();
        for (Eigen::Index k = last; k >= 0; --k) {
            if (std::abs(output(k) - s_star) > band) break;
            am.settling_time = traj.t(k);
        }

        if (closed_loop) {
            const auto& series = traj.agents[static_cast<std::size_t>(i)];
            am.sup_u = series.u.cwiseAbs().maxCoeff();
            const auto& plant = scn.plants[static_cast<std::size_t>(i)];
            for (Eigen::Index k = 0; k < rows; ++k) {
                if (traj.t(k) < window_start) continue;
                const double u_star =
                    feedforward_oracle(plant, s_star, traj.v.row(k).transpose());
                am.im_residual_sup =
                    std::max(am.im_residual_sup, std::abs(series.eta_ff(k) - u_star));
                am.u_star_sup = std::max(am.u_star_sup, std::abs(u_star));
            }
            if (am.u_star_sup > 0.0) am.im_residual_ratio = am.im_residual_sup / am.u_star_sup;
        }
    }
    return report;
}

}  // namespace dooc
