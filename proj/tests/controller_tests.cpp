#include "dooc/controller.hpp"
#include "dooc/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace dooc;

namespace {

RegulatorSpec unit_regulator() {
    const AgentPlant plant =
        AgentPlant::second_order_zero_dyn({1.0, 1.0, 1.0}, {-3.0, 0.0, 0.0}, 1.0, 10.0);
    return build_regulator(plant, 0.8);
}

}  // namespace

TEST_CASE("saturation clips outside the band and passes inside") {
    CHECK(saturate(0.5, 2.0) == 0.5);
    CHECK(saturate(5.0, 2.0) == 2.0);
    CHECK(saturate(-5.0, 2.0) == -2.0);

    SmallRng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const double r = rng.uniform(-20.0, 20.0);
        const double delta = rng.uniform(0.1, 5.0);
        const double once = saturate(r, delta);
        CHECK(saturate(once, delta) == once);                 // idempotent
        CHECK(saturate(-r, delta) == -once);                  // odd
        if (std::abs(r) < delta) CHECK(once == r);            // identity inside
        CHECK(std::abs(once) <= delta);
    }
}

TEST_CASE("composite variable") {
    Eigen::VectorXd gamma1(1);
    gamma1 << 1.0;

    SUBCASE("length-2 chain") {
        Eigen::VectorXd x(2);
        x << 3.0, 4.0;
        CHECK(theta_tilde(x, 3.0, 1.0, gamma1) == 4.0);
    }

    SUBCASE("length-3 chain with g = 2") {
        Eigen::VectorXd gamma(2);
        gamma << 1.0, 2.0;
        Eigen::VectorXd x(3);
        x << 1.0, 1.0, 1.0;
        CHECK(theta_tilde(x, 0.0, 2.0, gamma) == 9.0);
    }

    SUBCASE("perfect tracking zeroes it, for any positive gamma scaling") {
        for (double scale : {1.0, 0.25, 7.0}) {
            Eigen::VectorXd gamma(2);
            gamma << scale, 2.0 * scale;
            Eigen::VectorXd x(3);
            x << 1.5, 0.0, 0.0;
            CHECK(theta_tilde(x, 1.5, 3.0, gamma) == 0.0);
        }
    }
}

TEST_CASE("control output") {
    const RegulatorSpec reg = unit_regulator();
    ControllerGains gains;
    gains.K = 4e4;
    gains.delta = 10.0;
    gains.g = 1.0;

    const Eigen::VectorXd eta0 = Eigen::VectorXd::Zero(2);
    CHECK(control_output(0.0, eta0, reg, gains) == 0.0);
    CHECK(control_output(1.0, eta0, reg, gains) == -10.0);       // deep saturation
    CHECK(control_output(1e-6, eta0, reg, gains) ==
          doctest::Approx(-0.04).epsilon(1e-12));                // linear region
}

TEST_CASE("state feedback output") {
    ControllerGains gains;
    gains.K = 2.0;
    CHECK(state_feedback_output(0.0, gains) == 0.0);
    CHECK(state_feedback_output(3.0, gains) == -6.0);
}

TEST_CASE("unsaturated output feedback minus feedforward equals state feedback") {
    const RegulatorSpec reg = unit_regulator();
    ControllerGains gains;
    gains.K = 123.0;
    gains.delta = 1e18;  // never active
    SmallRng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const double theta = rng.uniform(-100.0, 100.0);
        Eigen::VectorXd eta(2);
        eta << rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0);
        const double ff = reg.Gamma_T_inv.dot(eta);
        CHECK(control_output(theta, eta, reg, gains) - ff ==
              doctest::Approx(state_feedback_output(theta, gains)).epsilon(1e-12));
    }
}

TEST_CASE("control output is bounded by delta plus the feedforward") {
    const RegulatorSpec reg = unit_regulator();
    ControllerGains gains;
    gains.K = 4e4;
    gains.delta = 7.0;
    SmallRng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = rng.uniform(-1000.0, 1000.0);
        Eigen::VectorXd eta(2);
        eta << rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0);
        CHECK(std::abs(control_output(theta, eta, reg, gains)) <=
              gains.delta + std::abs(reg.Gamma_T_inv.dot(eta)) + 1e-12);
    }
}

TEST_CASE("gain validation") {
    Eigen::VectorXd gamma1(1);
    gamma1 << 1.0;
    Eigen::VectorXd c2(2);
    c2 << 1.0, 2.0;

    SUBCASE("well-posed gains pass") {
        const auto report = validate_gains(gamma1, c2, 4e4, 1.0, 1e5);
        CHECK(report.ok);
        CHECK(report.issues.empty());
    }

    SUBCASE("binomial chain of order three has both roots at -1") {
        Eigen::VectorXd gamma(2);
        gamma << 1.0, 2.0;
        const auto report = validate_gains(gamma, c2, 1.0, 1.0, 1.0);
        CHECK(report.ok);
        CHECK(report.gamma_max_real == doctest::Approx(-1.0).epsilon(1e-9));
    }

    SUBCASE("negative coefficient fails the necessity screen") {
        Eigen::VectorXd bad(2);
        bad << -1.0, 2.0;
        CHECK_FALSE(validate_gains(gamma1, bad, 1.0, 1.0, 1.0).ok);
    }

    SUBCASE("non-Hurwitz gamma polynomial is rejected") {
        Eigen::VectorXd bad(1);
        bad << -1.0;
        CHECK_FALSE(validate_gains(bad, c2, 1.0, 1.0, 1.0).ok);
    }

    SUBCASE("scalar gains must be positive") {
        CHECK_FALSE(validate_gains(gamma1, c2, 0.0, 1.0, 1.0).ok);
        CHECK_FALSE(validate_gains(gamma1, c2, 1.0, -1.0, 1.0).ok);
        CHECK_FALSE(validate_gains(gamma1, c2, 1.0, 1.0, 0.0).ok);
    }
}
