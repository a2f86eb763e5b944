#include "dooc/errors.hpp"
#include "dooc/observer.hpp"
#include "dooc/plant.hpp"
#include "dooc/sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace dooc;

namespace {

// Coupled plant + observer integration, independent of the full simulator.
struct ObserverRun {
    double post_transient_sup = 0.0;  // sup_k |x_k - xt_k| for t >= 0.5
    double state_sup = 0.0;           // sup_k |x_k| over the same window
    double peak_estimate = 0.0;       // sup |xt| over t in [0, 0.1]
};

ObserverRun run_observer(double h, double t_final) {
    const AgentPlant plant =
        AgentPlant::third_order_chain({3.0, 3.0, 3.0}, {-4.0, -4.0, -3.1}, 1.0, 0.0);
    // p = (-1, -1, -0.1): mildly nonlinear, bounded under a bounded input
    const ObserverSpec obs = ObserverSpec::binomial(3, h);
    const double dt = 1e-4;

    Eigen::VectorXd state(6);
    state << 0.5, 0.7, -0.3, 0.5, 0.0, 0.0;  // x, then xt with xt1 = y(0)
    double t = 0.0;
    ObserverRun result;
    const auto steps = static_cast<long long>(t_final / dt);
    for (long long step = 0; step < steps; ++step) {
        const double u = 0.5 * std::sin(2.0 * t);
        state = rk4_step(
            [&](const Eigen::VectorXd& s) {
                Eigen::VectorXd d(6);
                d.head(3) = plant_rhs(plant, {}, s.head(3), u, Eigen::VectorXd::Zero(2)).dx;
                d.tail(3) = observer_rhs(obs, s.tail(3), s(0));
                return d;
            },
            state, dt);
        t += dt;
        if (t <= 0.1)
            result.peak_estimate = std::max(result.peak_estimate, state.tail(3).cwiseAbs().maxCoeff());
        if (t >= 0.5) {
            result.post_transient_sup = std::max(
                result.post_transient_sup, (state.head(3) - state.tail(3)).cwiseAbs().maxCoeff());
            result.state_sup = std::max(result.state_sup, state.head(3).cwiseAbs().maxCoeff());
        }
    }
    return result;
}

}  // namespace

TEST_CASE("gain column scales by increasing powers of h") {
    ObserverSpec spec;
    spec.n = 2;
    spec.h = 100.0;
    spec.c.resize(2);
    spec.c << 1.0, 2.0;
    const Eigen::VectorXd gain = observer_gain(spec);
    CHECK(gain(0) == 200.0);
    CHECK(gain(1) == 10000.0);

    spec.h = 1.0;  // reversed coefficients
    const Eigen::VectorXd unit = observer_gain(spec);
    CHECK(unit(0) == 2.0);
    CHECK(unit(1) == 1.0);

    const ObserverSpec b3 = ObserverSpec::binomial(3, 10.0);
    const Eigen::VectorXd g3 = observer_gain(b3);
    CHECK(g3(0) == 30.0);
    CHECK(g3(1) == 300.0);
    CHECK(g3(2) == 1000.0);
}

TEST_CASE("observer right-hand side") {
    ObserverSpec spec;
    spec.n = 2;
    spec.h = 1.0;
    spec.c.resize(2);
    spec.c << 1.0, 2.0;

    SUBCASE("matched output leaves a pure shift chain") {
        Eigen::VectorXd xt(2);
        xt << 1.0, 5.0;
        const Eigen::VectorXd d = observer_rhs(spec, xt, 1.0);
        CHECK(d(0) == 5.0);
        CHECK(d(1) == 0.0);
    }

    SUBCASE("unit output error injects the gain column") {
        const Eigen::VectorXd d = observer_rhs(spec, Eigen::VectorXd::Zero(2), 1.0);
        CHECK(d(0) == 2.0);
        CHECK(d(1) == 1.0);
    }

    SUBCASE("zero everywhere stays zero") {
        CHECK(observer_rhs(spec, Eigen::VectorXd::Zero(2), 0.0).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("estimation-error spectrum is the h-scaled root set") {
    const ObserverSpec spec = ObserverSpec::binomial(2, 100.0);
    const auto roots = estimation_error_spectrum(spec);
    REQUIRE(roots.size() == 2);
    for (const auto& r : roots) {
        CHECK(r.real() == doctest::Approx(-100.0).epsilon(1e-9));
        CHECK(std::abs(r.imag()) <= 1e-6);
    }

    const ObserverSpec unit = ObserverSpec::binomial(2, 1.0);
    for (const auto& r : estimation_error_spectrum(unit))
        CHECK(r.real() == doctest::Approx(-1.0).epsilon(1e-9));

    ObserverSpec bad;
    bad.n = 2;
    bad.h = 1.0;
    bad.c.resize(2);
    bad.c << -1.0, 0.0;
    CHECK_THROWS_AS((void)estimation_error_spectrum(bad), ValidationError);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS((void)ObserverSpec::binomial(0, 1.0), ValidationError);
    CHECK_THROWS_AS((void)ObserverSpec::binomial(2, 0.0), ValidationError);
    ObserverSpec mismatched;
    mismatched.n = 3;
    mismatched.h = 1.0;
    mismatched.c = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(mismatched.validate(), ValidationError);
}

TEST_CASE("high gain tracks a driven nonlinear chain after the transient") {
    const ObserverRun run = run_observer(100.0, 2.0);
    CHECK(run.post_transient_sup <= 1e-2 * (1.0 + run.state_sup));
}

TEST_CASE("doubling h shrinks the post-transient error and grows the peak") {
    const ObserverRun r25 = run_observer(25.0, 2.0);
    const ObserverRun r50 = run_observer(50.0, 2.0);
    const ObserverRun r100 = run_observer(100.0, 2.0);
    CHECK(r50.post_transient_sup < r25.post_transient_sup);
    CHECK(r100.post_transient_sup < r50.post_transient_sup);
    // peaking is the price paid for bandwidth
    CHECK(r50.peak_estimate > r25.peak_estimate);
    CHECK(r100.peak_estimate > r50.peak_estimate);
}
