#include "dooc/errors.hpp"
#include "dooc/regulator.hpp"
#include "dooc/rng.hpp"
#include "dooc/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace dooc;

namespace {

AgentPlant second_order_unit() {
    // p = (-2, 1, 1), b = 1, A = 10
    return AgentPlant::second_order_zero_dyn({1.0, 1.0, 1.0}, {-3.0, 0.0, 0.0}, 1.0, 10.0);
}

AgentPlant third_order_unit(double p3) {
    return AgentPlant::third_order_chain({3.0, 3.0, 3.0}, {-4.0, 0.0, p3 - 3.0}, 1.0, 10.0);
}

}  // namespace

TEST_CASE("companion form for the order-2 disturbance model") {
    Eigen::VectorXd ell(2);
    ell << -0.64, 0.0;
    const auto [phi, gamma] = build_phi_gamma(2, ell);
    Eigen::MatrixXd expected(2, 2);
    expected << 0.0, 1.0, -0.64, 0.0;
    CHECK((phi - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(gamma(0) == 1.0);
    CHECK(gamma(1) == 0.0);

    Eigen::EigenSolver<Eigen::MatrixXd> eig(phi, false);
    for (int k = 0; k < 2; ++k) {
        CHECK(std::abs(eig.eigenvalues()(k).real()) <= 1e-14);
        CHECK(std::abs(std::abs(eig.eigenvalues()(k).imag()) - 0.8) <= 1e-14);
    }
}

TEST_CASE("companion form for the order-3 disturbance model") {
    Eigen::VectorXd ell(3);
    ell << 0.0, -0.64, 0.0;
    const auto [phi, gamma] = build_phi_gamma(3, ell);
    Eigen::MatrixXd expected(3, 3);
    expected << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -0.64, 0.0;
    CHECK((phi - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate disturbance polynomials are rejected") {
    Eigen::VectorXd repeated(2);
    repeated << 0.0, 0.0;  // sigma^2, double root at zero
    CHECK_THROWS_AS((void)build_phi_gamma(2, repeated), ValidationError);

    Eigen::VectorXd off_axis(2);
    off_axis << 0.64, 0.0;  // sigma^2 - 0.64, roots +-0.8
    CHECK_THROWS_AS((void)build_phi_gamma(2, off_axis), ValidationError);
}

TEST_CASE("scalar Sylvester equation") {
    Eigen::MatrixXd phi(1, 1), m(1, 1);
    phi << 0.0;
    m << -1.0;
    Eigen::VectorXd n(1);
    n << 1.0;
    Eigen::RowVectorXd gamma(1);
    gamma << 1.0;
    const Eigen::MatrixXd t = solve_sylvester(phi, m, n, gamma);
    CHECK(t(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("benchmark order-2 pair solves to machine residual") {
    const RegulatorSpec reg = build_regulator(second_order_unit(), 0.8);
    CHECK(reg.sylvester_residual <= 1e-12);
    CHECK(reg.t_min_singular > 0.0);
    CHECK((reg.T * reg.Phi - reg.M * reg.T - reg.N * reg.Gamma).norm() <= 1e-12);
}

TEST_CASE("random disjoint-spectra instances solve below 1e-10") {
    SmallRng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int s = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
        Eigen::MatrixXd phi(s, s), m(s, s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                phi(i, j) = rng.uniform(-1.0, 1.0);
                m(i, j) = rng.uniform(-1.0, 1.0);
            }
        // Shift spectra apart: Phi strictly right of the imaginary axis,
        // M strictly left.
        phi += (s + 1.0) * Eigen::MatrixXd::Identity(s, s);
        m -= (s + 1.0) * Eigen::MatrixXd::Identity(s, s);
        Eigen::VectorXd n(s);
        Eigen::RowVectorXd gamma(s);
        for (int i = 0; i < s; ++i) {
            n(i) = rng.uniform(-1.0, 1.0);
            gamma(i) = rng.uniform(-1.0, 1.0);
        }
        const Eigen::MatrixXd t = solve_sylvester(phi, m, n, gamma);
        CHECK((t * phi - m * t - n * gamma).norm() <= 1e-10);
    }
}

TEST_CASE("shared spectra are rejected") {
    Eigen::MatrixXd phi(1, 1), m(1, 1);
    phi << -1.0;
    m << -1.0;
    Eigen::VectorXd n(1);
    n << 1.0;
    Eigen::RowVectorXd gamma(1);
    gamma << 1.0;
    CHECK_THROWS_AS((void)solve_sylvester(phi, m, n, gamma), ValidationError);
}

TEST_CASE("internal-model flow") {
    RegulatorSpec spec;
    spec.M.resize(2, 2);
    spec.M << 0.0, 1.0, -2.0, -3.0;
    spec.N.resize(2);
    spec.N << 0.0, 1.0;

    Eigen::VectorXd eta(2);
    eta << 1.0, 0.0;
    const Eigen::VectorXd d = regulator_rhs(spec, eta, 0.0);
    CHECK(d(0) == 0.0);
    CHECK(d(1) == -2.0);
    CHECK(regulator_rhs(spec, Eigen::VectorXd::Zero(2), 0.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(regulator_rhs(spec, Eigen::VectorXd::Zero(2), 1.0) == spec.N);
}

TEST_CASE("feedforward values") {
    Eigen::VectorXd v(2);

    SUBCASE("second-order family: -Aw2 v2 / b") {
        v << 0.0, 1.0;
        CHECK(feedforward_oracle(second_order_unit(), 2.0, v) == doctest::Approx(-12.0));
        CHECK(feedforward_oracle(second_order_unit(), 2.0, Eigen::VectorXd::Zero(2)) == 0.0);
    }

    SUBCASE("third-order family: -(p3 s*^3 + Aw3 v1) / b") {
        v << 1.0, 0.0;
        CHECK(feedforward_oracle(third_order_unit(3.0), 2.0, v) == doctest::Approx(-37.0));
    }

    SUBCASE("custom family has no closed form") {
        AgentPlant custom;
        custom.family = PlantFamily::Custom;
        custom.n_chain = 1;
        custom.custom_rhs = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double,
                               const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::VectorXd&) {};
        CHECK_THROWS_AS((void)feedforward_oracle(custom, 0.0, Eigen::VectorXd::Zero(2)),
                        ValidationError);
    }
}

TEST_CASE("feedforward derivative stack satisfies tau' = Phi tau along the flow") {
    const double theta = 0.8;
    const Exosystem exo = Exosystem::harmonic(theta);
    for (const AgentPlant& plant : {second_order_unit(), third_order_unit(4.2)}) {
        const RegulatorSpec reg = build_regulator(plant, theta);
        Eigen::VectorXd v = exo.v0;
        const double dt = 1e-6;
        for (int step = 0; step < 200; ++step) {
            const Eigen::VectorXd v_next =
                rk4_step([&exo](const Eigen::VectorXd& s) { return (exo.S * s).eval(); }, v, dt);
            const Eigen::VectorXd tau = feedforward_derivatives(plant, 2.0, v, theta);
            const Eigen::VectorXd tau_next = feedforward_derivatives(plant, 2.0, v_next, theta);
            const Eigen::VectorXd fd = (tau_next - tau) / dt;
            const Eigen::VectorXd analytic = reg.Phi * feedforward_derivatives(
                                                           plant, 2.0, 0.5 * (v + v_next), theta);
            CHECK((fd - analytic).cwiseAbs().maxCoeff() <= 1e-6);
            v = v_next;
        }
    }
}

TEST_CASE("internal model reproduces the feedforward from eta = T tau") {
    const double theta = 0.8;
    const AgentPlant plant = second_order_unit();
    const RegulatorSpec reg = build_regulator(plant, theta);
    const Exosystem exo = Exosystem::harmonic(theta);

    const Eigen::MatrixXd closed = reg.M + reg.N * reg.Gamma_T_inv;
    Eigen::VectorXd v = exo.v0;
    Eigen::VectorXd eta = reg.T * feedforward_derivatives(plant, 2.0, v, theta);
    const double dt = 1e-3;
    double sup = 0.0;
    for (int step = 0; step <= 20000; ++step) {
        sup = std::max(sup,
                       std::abs(reg.Gamma_T_inv.dot(eta) - feedforward_oracle(plant, 2.0, v)));
        eta = rk4_step([&closed](const Eigen::VectorXd& e) { return (closed * e).eval(); }, eta,
                       dt);
        v = rk4_step([&exo](const Eigen::VectorXd& s) { return (exo.S * s).eval(); }, v, dt);
    }
    CHECK(sup <= 1e-6);
}

TEST_CASE("stock internal-model pairs are controllable") {
    for (PlantFamily family :
         {PlantFamily::SecondOrderZeroDyn, PlantFamily::ThirdOrderChain}) {
        const auto [m, n] = default_internal_model_pair(family);
        CHECK(is_controllable(m, n));
    }
}

TEST_CASE("regulator construction rejects bad pairs") {
    const AgentPlant plant = second_order_unit();

    Eigen::MatrixXd unstable(2, 2);
    unstable << 0.0, 1.0, 2.0, 3.0;
    Eigen::VectorXd n(2);
    n << 0.0, 1.0;
    CHECK_THROWS_AS((void)build_regulator(plant, 0.8, &unstable, &n), ValidationError);

    Eigen::MatrixXd diag = -Eigen::MatrixXd::Identity(2, 2);
    diag(1, 1) = -2.0;
    Eigen::VectorXd n_bad(2);
    n_bad << 1.0, 0.0;  // second mode unreachable
    CHECK_THROWS_AS((void)build_regulator(plant, 0.8, &diag, &n_bad), ValidationError);

    CHECK_THROWS_AS((void)build_regulator(plant, 0.0), ValidationError);  // repeated roots
}
