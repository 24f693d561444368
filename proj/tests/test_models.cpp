#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adishort/gap_schedule.hpp"
#include "adishort/models.hpp"

using namespace adishort;
using models::Complex;
using models::Matrix;
using models::Vector;

TEST_CASE("effective two-level matrix layout and exact trace")
{
    const auto p = models::TwoLevelParams::constant_detuning(0.0, {1, 0}, {1, 0});
    const Matrix h = models::effective_two_level(p, 0.0);
    CHECK(h(0, 0) == Complex(0, 0));
    CHECK(h(0, 1) == Complex(0.5, 0));
    CHECK(h(1, 0) == Complex(0.5, 0));
    CHECK(h(1, 1) == Complex(0, 0));
    CHECK((h(0, 0) + h(1, 1)) == Complex(0, 0));

    const auto q = models::TwoLevelParams::constant_detuning(0.7, {0.3, 0.1}, {0.2, -0.4});
    const Matrix g = models::effective_two_level(q, 0.0);
    CHECK((g(0, 0) + g(1, 1)) == Complex(0, 0));
}

TEST_CASE("two-level spectra through the dense solver")
{
    SUBCASE("unit couplings with unit detuning")
    {
        const auto p = models::TwoLevelParams::constant_detuning(1.0, {1, 0}, {1, 0});
        const auto sys = spectral::eig_dense(models::effective_two_level(p, 0.0));
        CHECK(sys.values(1).real() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
    }
    SUBCASE("opposite coupling phases cancel in the product")
    {
        const Complex om = 0.8 * std::exp(Complex(0, std::numbers::pi / 4));
        const Complex omp = 0.8 * std::exp(Complex(0, -std::numbers::pi / 4));
        const auto p = models::TwoLevelParams::constant_detuning(0.6, om, omp);
        const auto sys = spectral::eig_dense(models::effective_two_level(p, 0.0));
        CHECK(std::abs(sys.values(0) - Complex(-0.5, 0)) < 1e-12);
        CHECK(std::abs(sys.values(1) - Complex(0.5, 0)) < 1e-12);
    }
}

TEST_CASE("mixing angles")
{
    SUBCASE("zero detuning gives a right angle")
    {
        const auto p = models::TwoLevelParams::constant_detuning(0.0, {1, 0}, {1, 0});
        const auto a = models::mixing_angles(p, 0.0);
        CHECK(a.theta.real() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
        CHECK(std::abs(a.theta.imag()) < 1e-12);
    }
    SUBCASE("Hermitian couplings make both angles coincide")
    {
        const Complex om(0.4, 0.3);
        const auto p = models::TwoLevelParams::constant_detuning(0.8, om, std::conj(om));
        const auto a = models::mixing_angles(p, 0.0);
        CHECK(std::abs(a.theta - a.theta_tilde) < 1e-12);
    }
    SUBCASE("asymmetric real couplings")
    {
        const auto p = models::TwoLevelParams::constant_detuning(0.6, {2, 0}, {0.5, 0});
        const auto a = models::mixing_angles(p, 0.0);
        const double expected = std::acos(0.6 / std::sqrt(1.36));
        CHECK(a.theta.real() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(a.theta_tilde.real() == doctest::Approx(expected).epsilon(1e-12));
        // reconstructed vectors solve the eigenproblem and pair biorthogonally
        const auto vecs = models::two_level_eigenvectors(p, 0.0);
        const Complex cross = vecs.left.col(1).dot(vecs.right.col(0));
        CHECK(std::abs(cross) < 1e-10);
        const Complex diag = vecs.left.col(0).dot(vecs.right.col(0));
        CHECK(std::abs(diag - Complex(1, 0)) < 1e-10);
    }
    SUBCASE("vanishing complex gap is rejected")
    {
        const auto p = models::TwoLevelParams::constant_detuning(1.0, {0, 1}, {0, 1});
        CHECK_THROWS_AS((void)models::mixing_angles(p, 0.0), models::ModelError);
    }
}

TEST_CASE("two-level eigenvector reconstruction at complex couplings")
{
    const Complex om = 2.0 * std::exp(Complex(0, 0.3));
    const Complex omp = 0.5 * std::exp(Complex(0, -0.2));
    const auto p = models::TwoLevelParams::constant_detuning(0.3, om, omp);
    const auto vecs = models::two_level_eigenvectors(p, 0.0);
    const Matrix h = models::effective_two_level(p, 0.0);
    const Complex gap = std::sqrt(Complex(0.09, 0) + om * omp);
    CHECK((h * vecs.right.col(1) - 0.5 * gap * vecs.right.col(1)).norm() < 1e-10);
    CHECK((h * vecs.right.col(0) + 0.5 * gap * vecs.right.col(0)).norm() < 1e-10);
    const Matrix pairing = vecs.left.adjoint() * vecs.right;
    CHECK((pairing - Matrix::Identity(2, 2)).norm() < 1e-9);
}

TEST_CASE("three-site chain at symmetric hopping")
{
    const models::SshParams p{2, 1.0, 0.0};
    const Matrix h = models::nh_ssh(p).build(1.0);
    CHECK(h.rows() == 3);
    CHECK(h(0, 1) == Complex(1, 0));
    CHECK(h(1, 0) == Complex(1, 0));
    CHECK(h(1, 2) == Complex(1, 0));
    CHECK(h(2, 1) == Complex(1, 0));
    CHECK(h(0, 2) == Complex(0, 0));
    const auto sys = spectral::eig_dense(h);
    CHECK(sys.values(0).real() == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(sys.values(1)) < 1e-12);
    CHECK(sys.values(2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("asymmetric intracell hops follow the sign convention")
{
    const models::SshParams p{2, 1.0, 1.0 / 3.0};
    const Matrix h = models::nh_ssh(p).build(0.5);
    CHECK(h(0, 1) == Complex(0.5 + 1.0 / 6.0, 0));
    CHECK(h(1, 0) == Complex(0.5 - 1.0 / 6.0, 0));
    CHECK(h(1, 2) == Complex(1, 0));
}

TEST_CASE("zero mode pins to exact zero energy inside both phases")
{
    const models::SshParams p{20, 1.0, 1.0 / 3.0};
    const auto model = models::nh_ssh(p);
    for (double t1 : {0.2, 2.8}) {
        const auto sys = spectral::eig_dense(model.build(t1));
        double best = 1e9;
        for (int i = 0; i < sys.dim(); ++i) {
            best = std::min(best, std::abs(sys.values(i)));
        }
        CHECK(best <= 1e-8 * p.t2);
    }
}

TEST_CASE("left edge state at zero intracell hopping")
{
    // The exact zero mode keeps a geometric tail of ratio gamma/(2 t2) per
    // cell, so its weight on site 1 is 1 - (gamma/2t2)^2 and not exactly one.
    const models::SshParams p{20, 1.0, 1.0 / 3.0};
    const Vector mode = models::zero_mode_state(p, 0.0);
    CHECK(std::abs(mode(0)) == doctest::Approx(std::sqrt(1.0 - 1.0 / 36.0)).epsilon(1e-9));
    CHECK(std::abs(mode(1)) < 1e-12);
    const Vector left = models::edge_target(p, models::Side::Left);
    CHECK(std::abs(left.dot(mode)) > 0.97);
}

TEST_CASE("edge targets")
{
    const models::SshParams small{2, 1.0, 1.0 / 3.0};
    const Vector l = models::edge_target(small, models::Side::Left);
    const Vector r = models::edge_target(small, models::Side::Right);
    CHECK(l(0) == Complex(1, 0));
    CHECK(l(1) == Complex(0, 0));
    CHECK(l(2) == Complex(0, 0));
    CHECK(r(2) == Complex(1, 0));

    const models::SshParams big{20, 1.0, 1.0 / 3.0};
    const Vector target = models::edge_target(big, models::Side::Right);
    const Vector mode = models::zero_mode_state(big, 3.0);
    CHECK(std::abs(target.dot(mode)) > 0.9);
}

TEST_CASE("gap closes at the topological interval boundary")
{
    const models::SshParams p{20, 1.0, 1.0 / 3.0};
    const auto model = models::nh_ssh(p);
    const auto profile = schedule::gap_profile(
        model, 0.0, 3.0, 601, schedule::PairSelector::zero_nearest());
    // At the closing the chain is similar to a uniform 39-site chain, whose
    // level nearest zero sits at 2 t2 sin(pi/40); the sweep minimum lands there.
    CHECK(profile.gap_min ==
          doctest::Approx(2.0 * std::sin(std::numbers::pi / 40.0)).epsilon(0.01));
    double argmin = 0.0;
    double best = 1e9;
    for (int i = 0; i < profile.size(); ++i) {
        if (profile.gap_abs[i] < best) {
            best = profile.gap_abs[i];
            argmin = profile.grid[i];
        }
    }
    // Finite chains shift the closing point a little below sqrt(t2^2+(g/2)^2).
    CHECK(std::abs(argmin - models::ssh_gap_closing_t1(p)) < 0.05);
}

TEST_CASE("pump chain construction")
{
    models::RiceMeleParams p;
    p.n_cells = 10;
    p.t0 = 1.0;
    p.delta0 = 0.6;
    p.big_delta0 = 0.36;
    const auto model = models::rice_mele(p);

    SUBCASE("phi = 0 reduces to a dimerized chain with no on-site terms")
    {
        const Matrix h = model.build(0.0);
        CHECK(h(0, 1) == Complex(1.6, 0));
        CHECK(h(1, 2) == Complex(0.4, 0));
        CHECK(h(0, 0) == Complex(0, 0));
        CHECK(h(1, 1) == Complex(0, 0));
    }
    SUBCASE("phi = pi/2 gives uniform hopping and the staggered potential")
    {
        const Matrix h = model.build(std::numbers::pi / 2);
        CHECK(std::abs(h(0, 1) - Complex(1.0, 0)) < 1e-15);
        CHECK(std::abs(h(1, 2) - Complex(1.0, 0)) < 1e-15);
        CHECK(std::abs(h(0, 0) - Complex(0.36, 0)) < 1e-15);
        CHECK(std::abs(h(1, 1) + Complex(0.36, 0)) < 1e-15);
    }
    SUBCASE("periodic wrap and Hermiticity at every phase")
    {
        for (int k = 0; k <= 16; ++k) {
            const double phi = 2 * std::numbers::pi * k / 16;
            const Matrix h = model.build(phi);
            CHECK((h - h.adjoint()).norm() == 0.0);
            CHECK(h(19, 0) == h(0, 19));
            CHECK(std::abs(h(19, 0) - Complex(p.t2(phi), 0)) < 1e-15);
        }
    }
    SUBCASE("minimum band gap over the cycle")
    {
        const auto profile = schedule::gap_profile(
            model, 0.0, 2 * std::numbers::pi, 801,
            schedule::PairSelector::half_filling(20));
        CHECK(profile.gap_min == doctest::Approx(0.72).epsilon(1e-3));
    }
}

TEST_CASE("symmetric chain is real symmetric at gamma zero")
{
    const models::SshParams p{8, 1.0, 0.0};
    const Matrix h = models::nh_ssh(p).build(1.7);
    CHECK((h - h.transpose()).norm() == 0.0);
    CHECK((h - h.adjoint()).norm() == 0.0);
}

TEST_CASE("gap derivative identity for a driven two-level system")
{
    // For delta0(R) = R the tracked gap obeys dE d(dE)/dt = delta d(delta)/dt
    // along any smooth drive.
    const auto p = models::TwoLevelParams::linear_detuning({1, 0}, {1, 0});
    const auto ramp = [](double t) { return -2.0 + 0.3 * t + 0.1 * std::sin(t); };
    const auto gap_at = [&](double t) {
        const double d = ramp(t);
        return std::sqrt(d * d + 1.0);
    };
    const double h = 1e-5;
    for (double t : {0.5, 2.0, 4.0, 7.5, 11.0}) {
        const double fd = (gap_at(t + h) - gap_at(t - h)) / (2 * h);
        const double delta = ramp(t);
        const double ddelta = 0.3 + 0.1 * std::cos(t);
        const double expected = delta * ddelta / gap_at(t);
        CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
    }
    (void)p;
}

TEST_CASE("model builders stay continuous in the control")
{
    const models::SshParams p{6, 1.0, 0.4};
    CHECK(models::continuous_on(models::nh_ssh(p), 0.0, 3.0, 200, 10.0));
    models::RiceMeleParams q;
    q.n_cells = 5;
    q.delta0 = 0.6;
    q.big_delta0 = 0.36;
    CHECK(models::continuous_on(models::rice_mele(q), 0.0, 6.3, 200, 10.0));
}
