#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "adishort/gap_schedule.hpp"
#include "adishort/models.hpp"

namespace adishort::dynamics {

using spectral::Complex;
using spectral::Matrix;
using spectral::Vector;

class DynamicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Normalized overlap magnitude |<target|psi>| / ||psi|| plus the raw overlap;
// both are kept because the evolution is generally non-unitary.
struct Fidelity {
    double normalized = 0.0;
    double raw = 0.0;
};
Fidelity fidelity(const Vector& psi, const Vector& target);

// Time series of one evolution.  States are stored every `store_stride` steps
// (first and last always); the fidelity columns are filled when a target was
// supplied, the s_prime column when diagnostics were attached afterwards.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> norms;
    std::vector<double> fidelity_normalized;
    std::vector<double> fidelity_raw;
    std::vector<double> s_prime;

    int samples() const { return static_cast<int>(times.size()); }
};

struct EvolveOptions {
    std::optional<Vector> target;
    int store_stride = 1;
};

// Integrates i d|psi>/dt = H(R(t)) |psi> with classical fixed-step RK4; the
// generator is evaluated at the step midpoints, which keeps fourth order for
// time-dependent H.  Requires a normalized initial state and at least ten
// integration steps per schedule tabulation interval.  Aborts with a gain
// diagnostic when the norm exceeds 1e12.
Trajectory evolve(const models::DrivenModel& model, const schedule::Schedule& sched,
                  const Vector& psi0, int n_steps, const EvolveOptions& options = {});

// Which reading of the adiabatic coefficient to evaluate along a schedule.
//
// MatrixElement is the literal non-Hermitian condition for the tracked pair,
//   |<phi~_-| dH/dt |phi_+>| / |dE|^2 * exp(int Im(dE) dt),
// with dH/dR by centered differences and dR/dt from the schedule tabulation.
// Spectral is the same condition reduced through the two-level identities, so
// it needs only |dE(t)| and the minimal gap:
//   (dE_min / 2|dE|) * |d|dE|/dt| / (|dE| sqrt(|dE|^2 - dE_min^2)) * exp(...).
enum class DiagnosticsForm { MatrixElement, Spectral };

struct DiagnosticsSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<bool> certified; // left/right pairing resolved to 1e-8 at this point
    double max_value = 0.0;      // over all points
    double max_certified = 0.0;  // over certified points only

    double value_at(double t) const; // linear interpolation
};

// Evaluates the adiabatic coefficient for the tracked pair at n_points uniform
// times along the schedule and reports the series and its maximum.
DiagnosticsSeries adiabatic_diagnostics(const models::DrivenModel& model,
                                        const schedule::Schedule& sched,
                                        const schedule::PairSelector& selector,
                                        int n_points,
                                        DiagnosticsForm form = DiagnosticsForm::MatrixElement,
                                        schedule::ImagGapSign imag_sign =
                                            schedule::ImagGapSign::AsTracked);

void attach_diagnostics(Trajectory& traj, const DiagnosticsSeries& series);

} // namespace adishort::dynamics
