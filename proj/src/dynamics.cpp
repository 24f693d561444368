#include "adishort/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace adishort::dynamics {

namespace {

constexpr double kNormCeiling = 1e12;
constexpr Complex kMinusI{0.0, -1.0};

double max_imag_eigenvalue(const models::DrivenModel& model,
                           const schedule::Schedule& sched)
{
    double worst = -std::numeric_limits<double>::infinity();
    const int samples = 32;
    for (int k = 0; k <= samples; ++k) {
        const double t = sched.total_time * k / samples;
        try {
            const auto sys = spectral::eig_dense(model.build(sched.value_at(t)));
            for (int i = 0; i < sys.dim(); ++i) {
                worst = std::max(worst, sys.values(i).imag());
            }
        } catch (const spectral::SpectralError&) {
            // A non-diagnosable sample does not change the abort decision.
        }
    }
    return worst;
}

} // namespace

Fidelity fidelity(const Vector& psi, const Vector& target)
{
    if (psi.size() != target.size()) {
        throw DynamicsError("fidelity: state and target dimensions differ");
    }
    if (std::abs(target.norm() - 1.0) > 1e-9) {
        throw DynamicsError("fidelity: target must be normalized");
    }
    const double norm = psi.norm();
    if (norm == 0.0) {
        throw DynamicsError("fidelity: state has zero norm");
    }
    Fidelity f;
    f.raw = std::abs(target.dot(psi));
    f.normalized = f.raw / norm;
    return f;
}

Trajectory evolve(const models::DrivenModel& model, const schedule::Schedule& sched,
                  const Vector& psi0, int n_steps, const EvolveOptions& options)
{
    if (psi0.size() != model.dim) {
        throw DynamicsError("evolve: initial state dimension does not match the model");
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw DynamicsError("evolve: initial state must be normalized");
    }
    const int min_steps = 10 * std::max(1, sched.size() - 1);
    if (n_steps < min_steps) {
        std::ostringstream msg;
        msg << "evolve: need at least " << min_steps
            << " steps for this schedule tabulation, got " << n_steps;
        throw DynamicsError(msg.str());
    }
    if (options.target && options.target->size() != model.dim) {
        throw DynamicsError("evolve: target dimension does not match the model");
    }
    const int stride = std::max(1, options.store_stride);

    const double dt = sched.total_time / n_steps;
    Trajectory traj;
    const int stored = n_steps / stride + 2;
    traj.times.reserve(static_cast<size_t>(stored));
    traj.states.reserve(static_cast<size_t>(stored));
    traj.norms.reserve(static_cast<size_t>(stored));

    const auto record = [&](double t, const Vector& psi) {
        traj.times.push_back(t);
        traj.states.push_back(psi);
        traj.norms.push_back(psi.norm());
        if (options.target) {
            const Fidelity f = fidelity(psi, *options.target);
            traj.fidelity_normalized.push_back(f.normalized);
            traj.fidelity_raw.push_back(f.raw);
        }
    };

    Vector psi = psi0;
    record(0.0, psi);

    Matrix h_t = model.build(sched.value_at(0.0));
    for (int step = 0; step < n_steps; ++step) {
        const double t = step * dt;
        const Matrix h_mid = model.build(sched.value_at(t + 0.5 * dt));
        const Matrix h_end = model.build(sched.value_at(t + dt));

        const Vector k1 = kMinusI * (h_t * psi);
        const Vector k2 = kMinusI * (h_mid * (psi + (0.5 * dt) * k1));
        const Vector k3 = kMinusI * (h_mid * (psi + (0.5 * dt) * k2));
        const Vector k4 = kMinusI * (h_end * (psi + dt * k3));
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        h_t = h_end;

        const double norm = psi.norm();
        if (!(norm < kNormCeiling)) {
            std::ostringstream msg;
            msg << "evolve: state norm " << norm << " exceeded " << kNormCeiling
                << " at t = " << (t + dt)
                << "; max Im(E) along the schedule is " << max_imag_eigenvalue(model, sched);
            throw DynamicsError(msg.str());
        }
        if ((step + 1) % stride == 0 && step + 1 < n_steps) {
            record((step + 1) * dt, psi);
        }
    }
    record(sched.total_time, psi);
    return traj;
}

double DiagnosticsSeries::value_at(double t) const
{
    if (times.empty()) {
        return 0.0;
    }
    if (t <= times.front()) {
        return values.front();
    }
    if (t >= times.back()) {
        return values.back();
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const size_t i = static_cast<size_t>(it - times.begin()) - 1;
    const double span = times[i + 1] - times[i];
    const double w = span > 0.0 ? (t - times[i]) / span : 0.0;
    return values[i] + w * (values[i + 1] - values[i]);
}

DiagnosticsSeries adiabatic_diagnostics(const models::DrivenModel& model,
                                        const schedule::Schedule& sched,
                                        const schedule::PairSelector& selector,
                                        int n_points, DiagnosticsForm form,
                                        schedule::ImagGapSign imag_sign)
{
    if (n_points < 8) {
        throw DynamicsError("adiabatic_diagnostics: need at least eight check points");
    }

    DiagnosticsSeries out;
    out.times.resize(static_cast<size_t>(n_points));
    out.values.assign(static_cast<size_t>(n_points), 0.0);
    out.certified.assign(static_cast<size_t>(n_points), true);

    std::vector<double> gap_abs(static_cast<size_t>(n_points));
    std::vector<double> gap_im(static_cast<size_t>(n_points));
    std::vector<double> element(static_cast<size_t>(n_points), 0.0);

    const double r_span =
        std::abs(*std::max_element(sched.values.begin(), sched.values.end()) -
                 *std::min_element(sched.values.begin(), sched.values.end()));
    const double h_r = 1e-6 * std::max(r_span, 1.0);

    for (int k = 0; k < n_points; ++k) {
        const double t = sched.total_time * k / (n_points - 1);
        out.times[static_cast<size_t>(k)] = t;
        const double r = sched.value_at(t);

        const auto raw = spectral::eig_dense(model.build(r));
        const auto [lo, up] = selector.pair_indices(raw);
        Complex gap = raw.values(up) - raw.values(lo);
        if (imag_sign == schedule::ImagGapSign::Flipped) {
            gap = std::conj(gap);
        }
        gap_abs[static_cast<size_t>(k)] = std::abs(gap);
        gap_im[static_cast<size_t>(k)] = gap.imag();

        if (form == DiagnosticsForm::MatrixElement) {
            const Matrix dh =
                (model.build(r + h_r) - model.build(r - h_r)) / (2.0 * h_r);
            try {
                const auto sys = spectral::biorthogonalize(raw);
                const double m_up =
                    std::abs(sys.left.col(lo).dot(dh * sys.right.col(up)));
                const double m_dn =
                    std::abs(sys.left.col(up).dot(dh * sys.right.col(lo)));
                element[static_cast<size_t>(k)] = std::max(m_up, m_dn);
                if (sys.pairing_residual > 1e-8) {
                    out.certified[static_cast<size_t>(k)] = false;
                }
            } catch (const spectral::SpectralError&) {
                element[static_cast<size_t>(k)] = std::numeric_limits<double>::quiet_NaN();
                out.certified[static_cast<size_t>(k)] = false;
            }
        }
    }

    // exp(+A) with A(t) the accumulated imaginary gap along the run.
    std::vector<double> exp_a(static_cast<size_t>(n_points), 1.0);
    double a = 0.0;
    for (int k = 1; k < n_points; ++k) {
        const double dt = out.times[static_cast<size_t>(k)] - out.times[static_cast<size_t>(k - 1)];
        a += 0.5 * dt * (gap_im[static_cast<size_t>(k - 1)] + gap_im[static_cast<size_t>(k)]);
        exp_a[static_cast<size_t>(k)] = std::exp(std::clamp(a, -700.0, 700.0));
    }

    const double gap_min = *std::min_element(gap_abs.begin(), gap_abs.end());

    for (int k = 0; k < n_points; ++k) {
        const double g = gap_abs[static_cast<size_t>(k)];
        if (form == DiagnosticsForm::MatrixElement) {
            const double drdt = sched.slope_at(out.times[static_cast<size_t>(k)]);
            out.values[static_cast<size_t>(k)] =
                element[static_cast<size_t>(k)] * std::abs(drdt) / (g * g) *
                exp_a[static_cast<size_t>(k)];
            continue;
        }

        // Spectral form: (gap_min / 2g) * |dg/dt| / (g sqrt(g^2 - gap_min^2)),
        // with the on-minimum 0/0 replaced by its parabolic-fit limit.
        const double excess = g * g - gap_min * gap_min;
        double ratio;
        if (excess > 1e-12 * gap_min * gap_min) {
            double dgdt;
            if (k == 0) {
                dgdt = (gap_abs[1] - gap_abs[0]) /
                       (out.times[1] - out.times[0]);
            } else if (k == n_points - 1) {
                dgdt = (gap_abs[static_cast<size_t>(k)] - gap_abs[static_cast<size_t>(k - 1)]) /
                       (out.times[static_cast<size_t>(k)] - out.times[static_cast<size_t>(k - 1)]);
            } else {
                dgdt = (gap_abs[static_cast<size_t>(k + 1)] - gap_abs[static_cast<size_t>(k - 1)]) /
                       (out.times[static_cast<size_t>(k + 1)] - out.times[static_cast<size_t>(k - 1)]);
            }
            ratio = std::abs(dgdt) / std::sqrt(excess);
        } else {
            double kappa = 0.0;
            for (int step = 1; step < n_points; ++step) {
                bool found = false;
                for (int j : {k + step, k - step}) {
                    if (j < 0 || j >= n_points) {
                        continue;
                    }
                    const double ex_j =
                        gap_abs[static_cast<size_t>(j)] * gap_abs[static_cast<size_t>(j)] -
                        gap_min * gap_min;
                    if (ex_j > 1e-12 * gap_min * gap_min) {
                        kappa = std::sqrt(ex_j) /
                                std::abs(out.times[static_cast<size_t>(j)] -
                                         out.times[static_cast<size_t>(k)]);
                        found = true;
                        break;
                    }
                }
                if (found) {
                    break;
                }
            }
            ratio = kappa / g;
        }
        out.values[static_cast<size_t>(k)] =
            0.5 * gap_min / (g * g) * ratio * exp_a[static_cast<size_t>(k)];
    }

    double max_all = 0.0;
    double max_cert = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double v = out.values[static_cast<size_t>(k)];
        if (std::isnan(v)) {
            continue;
        }
        max_all = std::max(max_all, v);
        if (out.certified[static_cast<size_t>(k)]) {
            max_cert = std::max(max_cert, v);
        }
    }
    out.max_value = max_all;
    out.max_certified = max_cert;
    return out;
}

void attach_diagnostics(Trajectory& traj, const DiagnosticsSeries& series)
{
    traj.s_prime.resize(traj.times.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
        traj.s_prime[i] = series.value_at(traj.times[i]);
    }
}

} // namespace adishort::dynamics
