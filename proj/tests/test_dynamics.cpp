#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adishort/dynamics.hpp"
#include "adishort/gap_schedule.hpp"
#include "adishort/models.hpp"

using namespace adishort;
using models::Complex;
using models::Matrix;
using models::Vector;

namespace {

models::DrivenModel static_model(const Matrix& h)
{
    models::DrivenModel m;
    m.dim = static_cast<int>(h.rows());
    m.control_name = "r";
    m.build = [h](double) { return h; };
    return m;
}

Matrix pauli_z_half()
{
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 0.5;
    h(1, 1) = -0.5;
    return h;
}

} // namespace

TEST_CASE("a stationary state acquires only a global phase")
{
    const auto model = static_model(pauli_z_half());
    const auto sched = schedule::linear(0.0, 0.0, 2 * std::numbers::pi, 2);
    Vector psi0(2);
    psi0 << Complex(1, 0), Complex(0, 0);
    dynamics::EvolveOptions opt;
    opt.target = psi0;
    const auto traj = dynamics::evolve(model, sched, psi0, 4000, opt);
    CHECK(traj.fidelity_normalized.back() == doctest::Approx(1.0).epsilon(1e-10));
    // e^{-i pi} = -1 on the upper component
    CHECK(std::abs(traj.states.back()(0) - Complex(-1, 0)) < 1e-9);
    CHECK(traj.states.front() == psi0);
}

TEST_CASE("Landau-Zener transition probability matches the closed form")
{
    // H = (1/2) [[v t, 1], [1, -v t]] swept through the crossing; the
    // probability of staying diabatic is exp(-pi/(2 v)).
    const double v = 2.0;
    const double half_window = 60.0;
    const auto p = models::TwoLevelParams::linear_detuning({1, 0}, {1, 0});
    const auto model = models::two_level_model(p);
    const auto sched =
        schedule::linear(-v * half_window, v * half_window, 2 * half_window, 1000);

    const auto start = spectral::eig_dense(model.build(-v * half_window));
    const auto end = spectral::eig_dense(model.build(v * half_window));
    const Vector psi0 = start.right.col(0);  // ground state at the far left
    const Vector upper = end.right.col(1);

    dynamics::EvolveOptions opt;
    opt.target = upper;
    const auto traj = dynamics::evolve(model, sched, psi0, 120000, opt);
    const double p_sim = traj.fidelity_normalized.back() * traj.fidelity_normalized.back();
    const double p_exact = std::exp(-std::numbers::pi / (2.0 * v));
    CHECK(p_sim == doctest::Approx(p_exact).epsilon(0.01));
}

TEST_CASE("chain transfer: the paced schedule beats the linear ramp")
{
    const models::SshParams p{10, 1.0, 1.0 / 3.0};
    const auto model = models::nh_ssh(p);
    const auto prof = schedule::gap_profile(model, 0.0, 3.0, 600,
                                            schedule::PairSelector::zero_nearest());
    const double T = 90.0;
    const auto cal = schedule::calibrate(prof, T);
    const auto lin = schedule::linear(0.0, 3.0, T, 599);
    const Vector psi0 = models::edge_target(p, models::Side::Left);
    dynamics::EvolveOptions opt;
    opt.target = models::edge_target(p, models::Side::Right);
    opt.store_stride = 6000;
    const auto a = dynamics::evolve(model, lin, psi0, 6000, opt);
    const auto b = dynamics::evolve(model, cal.schedule, psi0, 6000, opt);
    CHECK(b.fidelity_normalized.back() > a.fidelity_normalized.back());
}

TEST_CASE("fidelity definitions")
{
    Vector t(2);
    t << Complex(1, 0), Complex(0, 0);
    Vector perp(2);
    perp << Complex(0, 0), Complex(1, 0);
    CHECK(dynamics::fidelity(t, t).normalized == doctest::Approx(1.0));
    CHECK(dynamics::fidelity(perp, t).normalized == doctest::Approx(0.0));
    const Vector doubled = 2.0 * t;
    const auto f = dynamics::fidelity(doubled, t);
    CHECK(f.normalized == doctest::Approx(1.0));
    CHECK(f.raw == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)dynamics::fidelity(Vector::Zero(2), t), dynamics::DynamicsError);
    CHECK_THROWS_AS((void)dynamics::fidelity(t, doubled), dynamics::DynamicsError);
}

TEST_CASE("global error scales as the fourth power of the step")
{
    Matrix h(2, 2);
    h << Complex(0.5, 0), Complex(0.35, 0), Complex(0.35, 0), Complex(-0.5, 0);
    const auto model = static_model(h);
    const double t_final = 2.0;
    const auto sched = schedule::linear(0.0, 0.0, t_final, 2);

    // exact propagator by spectral decomposition
    const auto sys = spectral::eig_dense(h);
    Vector psi0(2);
    psi0 << Complex(0.8, 0), Complex(0.6, 0);
    Vector exact = Vector::Zero(2);
    for (int i = 0; i < 2; ++i) {
        const Complex c = sys.right.col(i).dot(psi0);
        exact += c * std::exp(Complex(0, -1) * sys.values(i) * t_final) * sys.right.col(i);
    }

    std::vector<double> errs;
    for (int n : {32, 64, 128, 256}) {
        const auto traj = dynamics::evolve(model, sched, psi0, n);
        errs.push_back((traj.states.back() - exact).norm());
    }
    for (size_t i = 0; i + 1 < errs.size(); ++i) {
        const double order = std::log2(errs[i] / errs[i + 1]);
        CHECK(order > 3.5);
        CHECK(order < 4.5);
    }
}

TEST_CASE("Hermitian evolution conserves the norm to 1e-8")
{
    const models::SshParams p{8, 1.0, 0.0};
    const auto model = models::nh_ssh(p);
    const auto sched = schedule::linear(0.0, 3.0, 50.0, 500);
    const Vector psi0 = models::edge_target(p, models::Side::Left);
    const auto traj = dynamics::evolve(model, sched, psi0, 20000);
    for (double n : traj.norms) {
        CHECK(std::abs(n - 1.0) <= 1e-8);
    }
}

TEST_CASE("runaway gain aborts with a diagnostic")
{
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = Complex(0.0, 14.0);
    h(1, 1) = Complex(0.0, -14.0);
    const auto model = static_model(h);
    const auto sched = schedule::linear(0.0, 0.0, 5.0, 2);
    Vector psi0(2);
    psi0 << Complex(1, 0), Complex(0, 0);
    CHECK_THROWS_WITH_AS((void)dynamics::evolve(model, sched, psi0, 4000),
                         doctest::Contains("Im(E)"), dynamics::DynamicsError);
}

TEST_CASE("evolution preconditions")
{
    const auto model = static_model(pauli_z_half());
    const auto sched = schedule::linear(0.0, 0.0, 1.0, 100);
    Vector psi0(2);
    psi0 << Complex(1, 0), Complex(0, 0);
    CHECK_THROWS_AS((void)dynamics::evolve(model, sched, psi0, 500),
                    dynamics::DynamicsError); // fewer than 10x tabulation
    Vector badnorm = 0.5 * psi0;
    CHECK_THROWS_AS((void)dynamics::evolve(model, sched, badnorm, 2000),
                    dynamics::DynamicsError);
}

TEST_CASE("adiabatic coefficient diagnostics")
{
    SUBCASE("no driving means a vanishing coefficient")
    {
        const auto model = static_model(pauli_z_half());
        const auto sched = schedule::linear(0.0, 0.0, 4.0, 64);
        const auto diag = dynamics::adiabatic_diagnostics(
            model, sched, schedule::PairSelector::sorted_indices(0, 1), 64);
        CHECK(diag.max_value == 0.0);
    }
    SUBCASE("a linear ramp peaks at the gap minimum")
    {
        const auto model =
            models::two_level_model(models::TwoLevelParams::linear_detuning({1, 0}, {1, 0}));
        const auto sched = schedule::linear(-3.0, 3.0, 40.0, 400);
        const auto diag = dynamics::adiabatic_diagnostics(
            model, sched, schedule::PairSelector::sorted_indices(0, 1), 801);
        double argmax = -1;
        double best = -1;
        for (size_t i = 0; i < diag.times.size(); ++i) {
            if (diag.values[i] > best) {
                best = diag.values[i];
                argmax = diag.times[i];
            }
        }
        CHECK(std::abs(argmax - 20.0) < 0.5); // R = 0 sits at T/2
        // |<dH/ddelta>| = sin(theta)/2 = 1/2 at the minimum; dR/dt = 6/40
        CHECK(best == doctest::Approx(0.5 * (6.0 / 40.0)).epsilon(0.01));
    }
    SUBCASE("a synthesized schedule keeps the coefficient under s")
    {
        const auto model =
            models::two_level_model(models::TwoLevelParams::linear_detuning({1, 0}, {1, 0}));
        const auto prof = schedule::gap_profile(model, -3.0, 3.0, 2001,
                                                schedule::PairSelector::sorted_indices(0, 1));
        const double s = 0.2;
        const auto sched = schedule::synthesize(prof, s);
        const auto diag = dynamics::adiabatic_diagnostics(
            model, sched, schedule::PairSelector::sorted_indices(0, 1), 2001,
            dynamics::DiagnosticsForm::MatrixElement);
        CHECK(diag.max_certified <= s * (1.0 + 1e-6));
        CHECK(diag.max_certified >= 0.4 * s); // the s/2 ceiling is approached
        // series attaches onto a trajectory
        Vector psi0(2);
        psi0 << Complex(0, 0), Complex(1, 0);
        dynamics::Trajectory traj =
            dynamics::evolve(model, sched, psi0, 10 * (sched.size() - 1));
        dynamics::attach_diagnostics(traj, diag);
        CHECK(traj.s_prime.size() == traj.times.size());
    }
}
