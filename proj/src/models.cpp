#include "adishort/models.hpp"

#include <cmath>
#include <sstream>

namespace adishort::models {

namespace {

// Branch-consistent square root: sqrt_for(theta) below pairs with acos so that
// sin(theta) equals gap_sqrt / gap at the same point.
Complex principal_sqrt(Complex z)
{
    return std::sqrt(z);
}

} // namespace

bool continuous_on(const DrivenModel& model, double r0, double r1, int samples,
                   double lipschitz_bound)
{
    if (samples < 2) {
        throw ModelError("continuous_on: need at least two samples");
    }
    const double h = (r1 - r0) / (samples - 1);
    Matrix prev = model.build(r0);
    if (prev.rows() != model.dim || prev.cols() != model.dim) {
        return false;
    }
    for (int k = 1; k < samples; ++k) {
        const Matrix cur = model.build(r0 + k * h);
        if (cur.rows() != model.dim || cur.cols() != model.dim) {
            return false;
        }
        if ((cur - prev).norm() > lipschitz_bound * std::abs(h)) {
            return false;
        }
        prev = cur;
    }
    return true;
}

TwoLevelParams TwoLevelParams::constant_detuning(double delta, Complex omega0,
                                                 Complex omega0p)
{
    TwoLevelParams p;
    p.delta0 = [delta](double) { return delta; };
    p.omega0 = omega0;
    p.omega0p = omega0p;
    return p;
}

TwoLevelParams TwoLevelParams::linear_detuning(Complex omega0, Complex omega0p)
{
    TwoLevelParams p;
    p.delta0 = [](double r) { return r; };
    p.omega0 = omega0;
    p.omega0p = omega0p;
    return p;
}

Matrix effective_two_level(const TwoLevelParams& p, double r)
{
    if (!p.delta0) {
        throw ModelError("effective_two_level: delta0 is not set");
    }
    const double d = p.delta0(r);
    if (!std::isfinite(d)) {
        throw ModelError("effective_two_level: delta0 is not finite at this control value");
    }
    Matrix h(2, 2);
    h(0, 0) = Complex(0.5 * d, 0.0);
    h(0, 1) = 0.5 * p.omega0;
    h(1, 0) = 0.5 * p.omega0p;
    h(1, 1) = Complex(-0.5 * d, 0.0);
    return h;
}

DrivenModel two_level_model(TwoLevelParams p)
{
    DrivenModel m;
    m.dim = 2;
    m.control_name = "delta0";
    m.static_params["omega0_re"] = p.omega0.real();
    m.static_params["omega0_im"] = p.omega0.imag();
    m.static_params["omega0p_re"] = p.omega0p.real();
    m.static_params["omega0p_im"] = p.omega0p.imag();
    m.build = [p = std::move(p)](double r) { return effective_two_level(p, r); };
    return m;
}

MixingAngles mixing_angles(const TwoLevelParams& p, double r)
{
    const double d = p.delta0(r);
    const Complex gap_sq = Complex(d * d, 0.0) + p.omega0 * p.omega0p;
    const Complex gap_sq_tilde =
        Complex(d * d, 0.0) + std::conj(p.omega0) * std::conj(p.omega0p);
    if (std::abs(gap_sq) == 0.0 || std::abs(gap_sq_tilde) == 0.0) {
        throw ModelError("mixing_angles: vanishing complex gap, angle undefined");
    }
    MixingAngles a;
    a.theta = std::acos(Complex(d, 0.0) / principal_sqrt(gap_sq));
    a.theta_tilde = std::acos(Complex(d, 0.0) / principal_sqrt(gap_sq_tilde));
    return a;
}

TwoLevelVectors two_level_eigenvectors(const TwoLevelParams& p, double r)
{
    if (std::abs(p.omega0) == 0.0 || std::abs(p.omega0p) == 0.0) {
        throw ModelError("two_level_eigenvectors: couplings must be nonzero");
    }
    const MixingAngles ang = mixing_angles(p, r);
    const Matrix h = effective_two_level(p, r);

    // Coupling-symmetrized frame S = diag(w, 1/w): there the eigenvectors are
    // the plain angle form (cos(t/2), sin(t/2)) / (-sin(t/2), cos(t/2)).
    const Complex w = std::pow(p.omega0 / p.omega0p, 0.25);
    const Complex ct = std::cos(ang.theta / 2.0);
    const Complex st = std::sin(ang.theta / 2.0);
    Matrix right(2, 2);
    right.col(0) << -w * st, ct / w; // minus branch
    right.col(1) << w * ct, st / w;  // plus branch

    const Complex wt = std::pow(std::conj(p.omega0p) / std::conj(p.omega0), 0.25);
    const Complex ctt = std::cos(ang.theta_tilde / 2.0);
    const Complex stt = std::sin(ang.theta_tilde / 2.0);
    Matrix left(2, 2);
    left.col(0) << -wt * stt, ctt / wt;
    left.col(1) << wt * ctt, stt / wt;

    // The conjugate spectrum can come out swapped across the sqrt branch cut;
    // align left columns with the right ones by pairing magnitude.
    const Complex d00 = left.col(0).dot(right.col(0));
    const Complex d10 = left.col(1).dot(right.col(0));
    if (std::abs(d00) < std::abs(d10)) {
        left.col(0).swap(left.col(1));
    }
    for (int i = 0; i < 2; ++i) {
        const Complex ov = left.col(i).dot(right.col(i));
        if (std::abs(ov) == 0.0) {
            throw ModelError("two_level_eigenvectors: defective pairing");
        }
        left.col(i) /= std::conj(ov);
    }

    // Residual check against the actual matrix keeps the branch bookkeeping
    // honest.
    const Complex gap =
        principal_sqrt(Complex(p.delta0(r) * p.delta0(r), 0.0) + p.omega0 * p.omega0p);
    const double scale = std::max(1.0, h.norm());
    const double res_plus = (h * right.col(1) - 0.5 * gap * right.col(1)).norm();
    const double res_minus = (h * right.col(0) + 0.5 * gap * right.col(0)).norm();
    if (res_plus / scale > 1e-10 || res_minus / scale > 1e-10) {
        throw ModelError("two_level_eigenvectors: reconstruction residual exceeds 1e-10");
    }
    return {right, left};
}

DrivenModel nh_ssh(const SshParams& p)
{
    if (p.n_cells < 2) {
        throw ModelError("nh_ssh: need at least two unit cells");
    }
    const int n = p.sites();
    DrivenModel m;
    m.dim = n;
    m.control_name = "t1";
    m.static_params["n_cells"] = p.n_cells;
    m.static_params["t2"] = p.t2;
    m.static_params["gamma"] = p.gamma;
    m.build = [p, n](double t1) {
        Matrix h = Matrix::Zero(n, n);
        for (int cell = 0; cell < p.n_cells; ++cell) {
            const int a = 2 * cell;
            const int b = 2 * cell + 1;
            if (b < n) {
                h(a, b) = Complex(t1 + 0.5 * p.gamma, 0.0);
                h(b, a) = Complex(t1 - 0.5 * p.gamma, 0.0);
            }
            const int a_next = 2 * (cell + 1);
            if (b < n && a_next < n) {
                h(b, a_next) = Complex(p.t2, 0.0);
                h(a_next, b) = Complex(p.t2, 0.0);
            }
        }
        return h;
    };
    return m;
}

double ssh_gap_closing_t1(const SshParams& p)
{
    return std::sqrt(p.t2 * p.t2 + 0.25 * p.gamma * p.gamma);
}

Vector edge_target(const SshParams& p, Side side)
{
    const int n = p.sites();
    Vector v = Vector::Zero(n);
    v(side == Side::Left ? 0 : n - 1) = Complex(1.0, 0.0);
    return v;
}

Vector zero_mode_state(const SshParams& p, double t1)
{
    const spectral::EigenSystem sys = spectral::eig_dense(nh_ssh(p).build(t1));
    int zero = 0;
    for (int i = 1; i < sys.dim(); ++i) {
        if (std::abs(sys.values(i)) < std::abs(sys.values(zero))) {
            zero = i;
        }
    }
    Vector v = sys.right.col(zero);
    int anchor = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(anchor))) {
            anchor = i;
        }
    }
    if (std::abs(v(anchor)) > 0.0) {
        v *= std::conj(v(anchor)) / std::abs(v(anchor));
    }
    return v / v.norm();
}

double RiceMeleParams::t1(double phi) const { return t0 + delta0 * std::cos(phi); }
double RiceMeleParams::t2(double phi) const { return t0 - delta0 * std::cos(phi); }
double RiceMeleParams::onsite(double phi) const { return big_delta0 * std::sin(phi); }

DrivenModel rice_mele(const RiceMeleParams& p)
{
    if (p.n_cells < 2) {
        throw ModelError("rice_mele: need at least two unit cells");
    }
    const int n = p.sites();
    DrivenModel m;
    m.dim = n;
    m.control_name = "phi";
    m.static_params["n_cells"] = p.n_cells;
    m.static_params["t0"] = p.t0;
    m.static_params["delta0"] = p.delta0;
    m.static_params["Delta0"] = p.big_delta0;
    m.static_params["periodic"] = p.boundary == Boundary::Periodic ? 1.0 : 0.0;
    m.build = [p, n](double phi) {
        const double t1 = p.t1(phi);
        const double t2 = p.t2(phi);
        const double onsite = p.onsite(phi);
        Matrix h = Matrix::Zero(n, n);
        for (int cell = 0; cell < p.n_cells; ++cell) {
            const int a = 2 * cell;
            const int b = 2 * cell + 1;
            h(a, a) = Complex(onsite, 0.0);
            h(b, b) = Complex(-onsite, 0.0);
            h(a, b) = Complex(t1, 0.0);
            h(b, a) = Complex(t1, 0.0);
            const int a_next = 2 * (cell + 1);
            if (a_next < n) {
                h(b, a_next) = Complex(t2, 0.0);
                h(a_next, b) = Complex(t2, 0.0);
            }
        }
        if (p.boundary == Boundary::Periodic) {
            const int b_last = n - 1;
            h(b_last, 0) += Complex(t2, 0.0);
            h(0, b_last) += Complex(t2, 0.0);
        }
        return h;
    };
    return m;
}

} // namespace adishort::models
