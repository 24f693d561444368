#include "adishort/gap_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace adishort::schedule {

namespace {

// Tolerance on |dE|^2 - dE_min^2 (relative to dE_min^2) below which a grid
// point counts as sitting on the gap minimum.
constexpr double kMinimumTol = 1e-12;

bool sort_after(const Complex& a, const Complex& b)
{
    if (a.real() != b.real()) {
        return a.real() > b.real();
    }
    return a.imag() > b.imag();
}

// d|dE|/dR / sqrt(|dE|^2 - dE_min^2) on the profile grid.  At grid points on
// the minimum the 0/0 is replaced by kappa / |dE|, with kappa^2 the curvature
// of |dE|^2 from the nearest off-minimum neighbor.
std::vector<double> regularized_ratio(const GapProfile& p)
{
    const int n = p.size();
    const double floor2 = kMinimumTol * p.gap_min * p.gap_min;
    std::vector<double> rho(static_cast<size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        const double excess = p.gap_abs[k] * p.gap_abs[k] - p.gap_min * p.gap_min;
        if (excess > floor2) {
            rho[static_cast<size_t>(k)] = std::abs(p.dgap_dr[k]) / std::sqrt(excess);
            continue;
        }
        double kappa = -1.0;
        for (int step = 1; step < n; ++step) {
            for (int j : {k + step, k - step}) {
                if (j < 0 || j >= n) {
                    continue;
                }
                const double ex_j = p.gap_abs[j] * p.gap_abs[j] - p.gap_min * p.gap_min;
                if (ex_j > floor2) {
                    kappa = std::sqrt(ex_j) / std::abs(p.grid[j] - p.grid[k]);
                    break;
                }
            }
            if (kappa >= 0.0) {
                break;
            }
        }
        if (kappa < 0.0) {
            throw ScheduleError(
                "synthesize: profile gap is constant at its minimum everywhere");
        }
        rho[static_cast<size_t>(k)] = kappa / p.gap_abs[k];
    }
    return rho;
}

bool is_constant_gap(const GapProfile& p)
{
    for (double d : p.dgap_dr) {
        if (d != 0.0) {
            return false;
        }
    }
    return true;
}

} // namespace

PairSelector PairSelector::zero_nearest()
{
    PairSelector s;
    s.kind = Kind::ZeroNearest;
    return s;
}

PairSelector PairSelector::sorted_indices(int lower, int upper)
{
    if (lower < 0 || upper < 0 || lower == upper) {
        throw ScheduleError("PairSelector: need two distinct nonnegative indices");
    }
    PairSelector s;
    s.kind = Kind::SortedIndices;
    s.lower = std::min(lower, upper);
    s.upper = std::max(lower, upper);
    return s;
}

PairSelector PairSelector::half_filling(int dim)
{
    if (dim < 2 || dim % 2 != 0) {
        throw ScheduleError("PairSelector: half filling needs an even dimension");
    }
    return sorted_indices(dim / 2 - 1, dim / 2);
}

std::pair<int, int> PairSelector::pair_indices(const spectral::EigenSystem& sys) const
{
    const int n = sys.dim();
    if (kind == Kind::SortedIndices) {
        if (upper >= n) {
            throw ScheduleError("PairSelector: index outside the spectrum");
        }
        return {lower, upper};
    }

    if (n < 2) {
        throw ScheduleError("PairSelector: need at least two levels");
    }
    int zero = 0;
    for (int i = 1; i < n; ++i) {
        if (std::abs(sys.values(i)) < std::abs(sys.values(zero))) {
            zero = i;
        }
    }
    int partner = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (i == zero) {
            continue;
        }
        const double d = std::abs(sys.values(i) - sys.values(zero));
        if (d < best * (1.0 - 1e-12)) {
            best = d;
            partner = i;
        } else if (d <= best * (1.0 + 1e-12) &&
                   sort_after(sys.values(i), sys.values(partner))) {
            partner = i; // tie: prefer the upper branch
        }
    }
    if (sort_after(sys.values(zero), sys.values(partner))) {
        return {partner, zero};
    }
    return {zero, partner};
}

Complex PairSelector::signed_gap(const spectral::EigenSystem& sys) const
{
    const auto [lo, up] = pair_indices(sys);
    return sys.values(up) - sys.values(lo);
}

std::string PairSelector::label() const
{
    if (kind == Kind::ZeroNearest) {
        return "zero-nearest";
    }
    std::ostringstream os;
    os << "levels-" << lower << "-" << upper;
    return os.str();
}

GapProfile gap_profile(const models::DrivenModel& model, double r_start, double r_end,
                       int grid_size, const PairSelector& selector,
                       ImagGapSign imag_sign)
{
    if (grid_size < 64) {
        throw ScheduleError("gap_profile: grid_size must be at least 64");
    }
    if (!(r_end > r_start)) {
        throw ScheduleError("gap_profile: need r_end > r_start");
    }

    GapProfile p;
    p.pair = selector.label();
    const int n = grid_size;
    const double h = (r_end - r_start) / (n - 1);
    p.grid.resize(static_cast<size_t>(n));
    p.gap.resize(static_cast<size_t>(n));
    p.gap_abs.resize(static_cast<size_t>(n));
    p.dgap_dr.resize(static_cast<size_t>(n));

    for (int k = 0; k < n; ++k) {
        const double r = (k == n - 1) ? r_end : r_start + k * h;
        p.grid[static_cast<size_t>(k)] = r;
        const spectral::EigenSystem sys = spectral::eig_dense(model.build(r));
        Complex gap = selector.signed_gap(sys);
        if (imag_sign == ImagGapSign::Flipped) {
            gap = std::conj(gap);
        }
        const double mag = std::abs(gap);
        if (mag < 1e-10) {
            std::ostringstream msg;
            msg << "gap_profile: tracked pair degenerates at " << model.control_name
                << " = " << r << " (|gap| = " << mag << ")";
            throw ScheduleError(msg.str());
        }
        p.gap[static_cast<size_t>(k)] = gap;
        p.gap_abs[static_cast<size_t>(k)] = mag;
    }

    p.gap_min = *std::min_element(p.gap_abs.begin(), p.gap_abs.end());
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            p.dgap_dr[0] = (p.gap_abs[1] - p.gap_abs[0]) / h;
        } else if (k == n - 1) {
            p.dgap_dr[static_cast<size_t>(k)] =
                (p.gap_abs[static_cast<size_t>(k)] - p.gap_abs[static_cast<size_t>(k - 1)]) / h;
        } else {
            p.dgap_dr[static_cast<size_t>(k)] =
                (p.gap_abs[static_cast<size_t>(k + 1)] - p.gap_abs[static_cast<size_t>(k - 1)]) /
                (2.0 * h);
        }
    }
    double lip = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        lip = std::max(lip, std::abs(p.gap[static_cast<size_t>(k + 1)] -
                                     p.gap[static_cast<size_t>(k)]) / h);
    }
    p.lipschitz = lip;
    return p;
}

double Schedule::value_at(double t) const
{
    if (times.size() < 2 || t <= times.front()) {
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

double Schedule::slope_at(double t) const
{
    if (times.size() < 2) {
        return 0.0;
    }
    const double tc = std::clamp(t, times.front(), times.back());
    size_t i = static_cast<size_t>(
        std::upper_bound(times.begin(), times.end(), tc) - times.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i + 1 >= times.size()) {
        i = times.size() - 2;
    }
    const double span = times[i + 1] - times[i];
    return span > 0.0 ? (values[i + 1] - values[i]) / span : 0.0;
}

Schedule synthesize(const GapProfile& profile, double s, const SynthesisOptions& options)
{
    if (!(s > 0.0)) {
        throw ScheduleError("synthesize: adiabatic coefficient s must be positive");
    }
    const int n = profile.size();
    if (n < 2) {
        throw ScheduleError("synthesize: profile needs at least two grid points");
    }
    if (options.direction != 1 && options.direction != -1) {
        throw ScheduleError("synthesize: direction must be +1 or -1");
    }

    if (is_constant_gap(profile)) {
        // No gap variation means no pace information; the nominal duration
        // 1/(s * gap) keeps downstream dynamics well-posed.
        Schedule fallback = (options.direction == 1)
            ? linear(profile.grid.front(), profile.grid.back(),
                     1.0 / (s * profile.gap_min), n - 1)
            : linear(profile.grid.back(), profile.grid.front(),
                     1.0 / (s * profile.gap_min), n - 1);
        fallback.zero_cost = true;
        fallback.s = s;
        return fallback;
    }

    const std::vector<double> rho = regularized_ratio(profile);

    std::vector<int> order(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        order[static_cast<size_t>(k)] = (options.direction == 1) ? k : n - 1 - k;
    }

    std::vector<double> q(static_cast<size_t>(n), 0.0);
    std::vector<double> im(static_cast<size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        const int idx = order[static_cast<size_t>(k)];
        q[static_cast<size_t>(k)] =
            rho[static_cast<size_t>(idx)] / (s * profile.gap_abs[static_cast<size_t>(idx)]);
        im[static_cast<size_t>(k)] =
            options.use_imag_exponent ? profile.gap[static_cast<size_t>(idx)].imag() : 0.0;
    }

    Schedule out;
    out.kind = ScheduleKind::Shortcut;
    out.s = s;
    out.times.resize(static_cast<size_t>(n));
    out.values.resize(static_cast<size_t>(n));
    out.times[0] = 0.0;
    out.values[0] = profile.grid[static_cast<size_t>(order[0])];

    double u = 1.0; // exp(A), A = integral of Im(dE) dt
    double f_prev = q[0] / u;
    for (int k = 0; k + 1 < n; ++k) {
        const int a = order[static_cast<size_t>(k)];
        const int b = order[static_cast<size_t>(k + 1)];
        const double h = std::abs(profile.grid[static_cast<size_t>(b)] -
                                  profile.grid[static_cast<size_t>(a)]);
        u += 0.5 * h * (im[static_cast<size_t>(k)] * q[static_cast<size_t>(k)] +
                        im[static_cast<size_t>(k + 1)] * q[static_cast<size_t>(k + 1)]);
        if (!(u > 0.0) || std::abs(std::log(u)) > 700.0) {
            std::ostringstream msg;
            msg << "synthesize: imaginary-gap accumulator overflows near R = "
                << profile.grid[static_cast<size_t>(b)] << " (exp(A) = " << u << ")";
            throw ScheduleError(msg.str());
        }
        const double f = q[static_cast<size_t>(k + 1)] / u;
        const double dt = 0.5 * h * (f_prev + f);
        out.times[static_cast<size_t>(k + 1)] = out.times[static_cast<size_t>(k)] + dt;
        out.values[static_cast<size_t>(k + 1)] = profile.grid[static_cast<size_t>(b)];
        if (!(out.times[static_cast<size_t>(k + 1)] > out.times[static_cast<size_t>(k)])) {
            std::ostringstream msg;
            msg << "synthesize: time stalls at R = " << profile.grid[static_cast<size_t>(b)]
                << "; the gap profile is flat over an extended span";
            throw ScheduleError(msg.str());
        }
        f_prev = f;
    }
    out.total_time = out.times.back();
    return out;
}

Calibration calibrate(const GapProfile& profile, double t_target,
                      const SynthesisOptions& options)
{
    if (!(t_target > 0.0)) {
        throw ScheduleError("calibrate: target time must be positive");
    }
    if (is_constant_gap(profile)) {
        throw ScheduleError(
            "calibrate: constant-gap profile has zero cost; any total time is reachable "
            "with a linear ramp, nothing to calibrate");
    }

    const auto duration = [&](double s) { return synthesize(profile, s, options).total_time; };

    // T(s) ~ C/s up to the imaginary-gap factor, so C/t_target centers the bracket.
    const double c = duration(1.0);
    double s_mid = c / t_target;
    double s_lo = 0.5 * s_mid;
    double s_hi = 2.0 * s_mid;
    int guard = 0;
    while (duration(s_lo) < t_target && guard++ < 200) {
        s_lo *= 0.5;
    }
    guard = 0;
    while (duration(s_hi) > t_target && guard++ < 200) {
        s_hi *= 2.0;
    }

    double t_lo = duration(s_lo);
    double t_hi = duration(s_hi);
    if (t_lo < t_target || t_hi > t_target) {
        std::ostringstream msg;
        msg << "calibrate: could not bracket total time " << t_target
            << " (reachable range [" << t_hi << ", " << t_lo << "])";
        throw ScheduleError(msg.str());
    }

    for (int iter = 0; iter < 200; ++iter) {
        const double s = std::sqrt(s_lo * s_hi);
        const double t = duration(s);
        if (std::abs(t - t_target) <= 1e-9 * t_target) {
            s_lo = s_hi = s;
            break;
        }
        if (t > t_target) {
            s_lo = s;
        } else {
            s_hi = s;
        }
        if (s_hi - s_lo <= 1e-15 * s_hi) {
            break;
        }
    }

    Calibration cal;
    cal.s = std::sqrt(s_lo * s_hi);
    cal.schedule = synthesize(profile, cal.s, options);
    const double err = std::abs(cal.schedule.total_time - t_target) / t_target;
    if (err > 1e-6) {
        std::ostringstream msg;
        msg << "calibrate: bisection stalled at relative error " << err;
        throw ScheduleError(msg.str());
    }
    return cal;
}

Schedule linear(double r_start, double r_end, double total_time, int n_steps)
{
    if (!(total_time > 0.0)) {
        throw ScheduleError("linear: total time must be positive");
    }
    if (n_steps < 2) {
        throw ScheduleError("linear: need at least two steps");
    }
    Schedule out;
    out.kind = ScheduleKind::Linear;
    out.total_time = total_time;
    out.times.resize(static_cast<size_t>(n_steps) + 1);
    out.values.resize(static_cast<size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) {
        const double w = static_cast<double>(k) / n_steps;
        out.times[static_cast<size_t>(k)] = total_time * w;
        out.values[static_cast<size_t>(k)] = r_start + (r_end - r_start) * w;
    }
    out.times.back() = total_time;
    out.values.back() = r_end;
    return out;
}

} // namespace adishort::schedule
