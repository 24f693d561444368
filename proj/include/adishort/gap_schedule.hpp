#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adishort/models.hpp"
#include "adishort/spectral.hpp"

namespace adishort::schedule {

using spectral::Complex;

class ScheduleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// How to pick the tracked level pair out of each sorted eigensystem.
//
// ZeroNearest re-identifies per grid point: the level of smallest |E| is the
// zero mode, its partner the next-smallest |E| (ties resolved toward the upper
// branch).  Chiral symmetry pins the zero mode at E = 0 for every control
// value, so per-point re-identification stays on one physical pair even where
// eigenvector continuity breaks down.  SortedIndices takes two fixed positions
// in the sorted spectrum (e.g. highest occupied / lowest unoccupied at half
// filling).
struct PairSelector {
    enum class Kind { ZeroNearest, SortedIndices };
    Kind kind = Kind::ZeroNearest;
    int lower = -1;
    int upper = -1;

    static PairSelector zero_nearest();
    static PairSelector sorted_indices(int lower, int upper);
    static PairSelector half_filling(int dim); // (dim/2 - 1, dim/2)

    // Positions of the tracked pair in the sorted spectrum, (lower, upper).
    std::pair<int, int> pair_indices(const spectral::EigenSystem& sys) const;
    // Signed gap upper - lower for one eigensystem.
    Complex signed_gap(const spectral::EigenSystem& sys) const;
    std::string label() const;
};

// Sign convention for Im(gap) when the tracked eigenvalues form a complex
// conjugate pair; the tracking order fixes it only up to this switch.
enum class ImagGapSign { AsTracked, Flipped };

// Sampled gap between one tracked level pair over a control grid.
struct GapProfile {
    std::vector<double> grid;     // ascending control values
    std::vector<Complex> gap;     // tracked Delta E = E_upper - E_lower
    std::vector<double> gap_abs;  // |Delta E|
    std::vector<double> dgap_dr;  // d|Delta E|/dR, centered differences
    double gap_min = 0.0;         // min |Delta E| over the grid
    double lipschitz = 0.0;       // max |gap step| / |grid step|
    std::string pair;

    int size() const { return static_cast<int>(grid.size()); }
};

// Samples the tracked gap of `model` over [r_start, r_end] on a uniform grid.
// grid_size >= 64.  Fails hard if the tracked pair degenerates
// (|Delta E| < 1e-10): the schedule equation is undefined there.
GapProfile gap_profile(const models::DrivenModel& model, double r_start, double r_end,
                       int grid_size, const PairSelector& selector,
                       ImagGapSign imag_sign = ImagGapSign::AsTracked);

enum class ScheduleKind { Linear, Shortcut };

// A monotone time parameterization R(t) on [0, T].
struct Schedule {
    std::vector<double> times;  // ascending, times.front() = 0
    std::vector<double> values; // R at each tabulated time
    ScheduleKind kind = ScheduleKind::Linear;
    double s = 0.0;             // adiabatic coefficient (Shortcut only)
    double total_time = 0.0;
    bool zero_cost = false;     // gap never varied; linear fallback returned

    int size() const { return static_cast<int>(times.size()); }
    double value_at(double t) const;  // linear interpolation, clamped to [0, T]
    double slope_at(double t) const;  // slope of the containing segment
};

struct SynthesisOptions {
    int direction = +1;             // +1: grid order, -1: reversed traversal
    bool use_imag_exponent = true;  // disable to compare against the bare form
};

// Integrates the driving-rate relation
//
//   dt/dR = |d|dE|/dR| * exp(-A) / (s * |dE| * sqrt(|dE|^2 - dE_min^2)),
//   dA/dR = Im(dE) * dt/dR,
//
// over the profile grid by trapezoidal quadrature, with the 0/0 at the gap
// minimum replaced by its finite limit from a one-sided parabolic fit of
// |dE|^2.  The accumulator has the closed form exp(A) = 1 + integral of
// Im(dE) * q, which is what the marching uses.  A constant-gap profile has no
// defined pace; it returns a linear fallback flagged zero_cost.
Schedule synthesize(const GapProfile& profile, double s,
                    const SynthesisOptions& options = {});

// Finds s such that synthesize() lands on total_time = t_target within 1e-6
// relative, by expanding bracket plus bisection on the monotone map s -> T.
struct Calibration {
    double s = 0.0;
    Schedule schedule;
};
Calibration calibrate(const GapProfile& profile, double t_target,
                      const SynthesisOptions& options = {});

// R(t) = r_start + (r_end - r_start) * t / T on n_steps+1 uniform samples.
Schedule linear(double r_start, double r_end, double total_time, int n_steps);

} // namespace adishort::schedule
