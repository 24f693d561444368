#include "adishort/topology.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace adishort::topology {

namespace {

constexpr double kPi = std::numbers::pi;

double gap_floor(const models::RiceMeleParams& p)
{
    return 1e-8 * (std::abs(p.t0) + std::abs(p.delta0) + std::abs(p.big_delta0));
}

// Analytic 2x2 eigenpair of the Bloch matrix; avoids a general solver call in
// the innermost grid loops.
struct BlochBands {
    double energy_low = 0.0;
    double energy_high = 0.0;
    Vector low;
    Vector high;
};

BlochBands bloch_bands(const models::RiceMeleParams& p, double k, double phi)
{
    const double delta = p.onsite(phi);
    const Complex f = Complex(p.t1(phi), 0.0) +
                      Complex(p.t2(phi), 0.0) * std::exp(Complex(0.0, -k));
    const double e = std::sqrt(delta * delta + std::norm(f));

    BlochBands bands;
    bands.energy_low = -e;
    bands.energy_high = e;
    bands.low.resize(2);
    bands.high.resize(2);
    if (e == 0.0) {
        throw TopologyError("bloch_bands: gap closes exactly at this (k, phi)");
    }
    // Eigenvector construction stable on both sides of the band inversion.
    if (delta >= 0.0) {
        bands.low << -f, Complex(delta + e, 0.0);
        bands.high << Complex(delta + e, 0.0), std::conj(f);
    } else {
        bands.low << Complex(e - delta, 0.0), -std::conj(f);
        bands.high << f, Complex(e - delta, 0.0);
    }
    bands.low /= bands.low.norm();
    bands.high /= bands.high.norm();
    return bands;
}

void fix_gauge(Vector& v)
{
    for (int i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > 1e-14) {
            v *= std::conj(v(i)) / mag;
            return;
        }
    }
}

} // namespace

double BlochGrid::k_at(int j) const { return -kPi + 2.0 * kPi * j / n_k; }
double BlochGrid::phi_at(int m) const { return 2.0 * kPi * m / n_phi; }

Matrix bloch_hamiltonian(const models::RiceMeleParams& p, double k, double phi)
{
    const double delta = p.onsite(phi);
    const Complex f = Complex(p.t1(phi), 0.0) +
                      Complex(p.t2(phi), 0.0) * std::exp(Complex(0.0, -k));
    Matrix h(2, 2);
    h(0, 0) = Complex(delta, 0.0);
    h(0, 1) = f;
    h(1, 0) = std::conj(f);
    h(1, 1) = Complex(-delta, 0.0);
    return h;
}

Vector occupied_state(const models::RiceMeleParams& p, double k, double phi,
                      int band_index)
{
    const BlochBands bands = bloch_bands(p, k, phi);
    Vector v = band_index == 0 ? bands.low : bands.high;
    fix_gauge(v);
    return v;
}

int chern_number(const models::RiceMeleParams& p, const BlochGrid& grid,
                 const std::function<Complex(int, int)>& gauge_phase)
{
    if (grid.n_k < 4 || grid.n_phi < 4) {
        throw TopologyError("chern_number: grid must be at least 4x4");
    }
    const double floor = gap_floor(p);

    std::vector<Vector> states(static_cast<size_t>(grid.n_k) * grid.n_phi);
    for (int m = 0; m < grid.n_phi; ++m) {
        for (int j = 0; j < grid.n_k; ++j) {
            const double k = grid.k_at(j);
            const double phi = grid.phi_at(m);
            const BlochBands bands = bloch_bands(p, k, phi);
            if (bands.energy_high - bands.energy_low < floor) {
                std::ostringstream msg;
                msg << "chern_number: gap closes on the grid at k = " << k
                    << ", phi = " << phi;
                throw TopologyError(msg.str());
            }
            Vector v = grid.band_index == 0 ? bands.low : bands.high;
            fix_gauge(v);
            if (gauge_phase) {
                v *= gauge_phase(j, m) / std::abs(gauge_phase(j, m));
            }
            states[static_cast<size_t>(m) * grid.n_k + j] = v;
        }
    }

    const auto link = [&](int j0, int m0, int j1, int m1) {
        const Vector& a = states[static_cast<size_t>(m0) * grid.n_k + j0];
        const Vector& b = states[static_cast<size_t>(m1) * grid.n_k + j1];
        const Complex u = a.dot(b);
        if (std::abs(u) < 1e-12) {
            throw TopologyError("chern_number: vanishing link variable; refine the grid");
        }
        return u / std::abs(u);
    };

    double total = 0.0;
    for (int m = 0; m < grid.n_phi; ++m) {
        const int m1 = (m + 1) % grid.n_phi;
        for (int j = 0; j < grid.n_k; ++j) {
            const int j1 = (j + 1) % grid.n_k;
            const Complex loop = link(j, m, j1, m) * link(j1, m, j1, m1) /
                                 (link(j, m1, j1, m1) * link(j, m, j, m1));
            total += std::arg(loop);
        }
    }
    const double c = total / (2.0 * kPi);
    const double rounded = std::round(c);
    if (std::abs(c - rounded) > 1e-3) {
        std::ostringstream msg;
        msg << "chern_number: curvature sum " << c
            << " is not an integer; the grid is too coarse";
        throw TopologyError(msg.str());
    }
    return static_cast<int>(rounded);
}

CurvatureField berry_curvature(const models::RiceMeleParams& p, const BlochGrid& grid)
{
    std::vector<Vector> states(static_cast<size_t>(grid.n_k) * grid.n_phi);
    for (int m = 0; m < grid.n_phi; ++m) {
        for (int j = 0; j < grid.n_k; ++j) {
            Vector v = occupied_state(p, grid.k_at(j), grid.phi_at(m), grid.band_index);
            states[static_cast<size_t>(m) * grid.n_k + j] = v;
        }
    }
    const auto link = [&](int j0, int m0, int j1, int m1) {
        const Vector& a = states[static_cast<size_t>(m0) * grid.n_k + j0];
        const Vector& b = states[static_cast<size_t>(m1) * grid.n_k + j1];
        const Complex u = a.dot(b);
        return u / std::abs(u);
    };

    CurvatureField field;
    field.k.reserve(static_cast<size_t>(grid.n_k) * grid.n_phi);
    field.phi.reserve(field.k.capacity());
    field.f.reserve(field.k.capacity());
    for (int m = 0; m < grid.n_phi; ++m) {
        const int m1 = (m + 1) % grid.n_phi;
        for (int j = 0; j < grid.n_k; ++j) {
            const int j1 = (j + 1) % grid.n_k;
            const Complex loop = link(j, m, j1, m) * link(j1, m, j1, m1) /
                                 (link(j, m1, j1, m1) * link(j, m, j, m1));
            field.k.push_back(grid.k_at(j));
            field.phi.push_back(grid.phi_at(m));
            field.f.push_back(std::arg(loop));
        }
    }
    return field;
}

double polarization(const models::RiceMeleParams& p, double phi, int n_k,
                    const std::function<Complex(int)>& gauge_phase)
{
    if (n_k < 8) {
        throw TopologyError("polarization: need at least eight k points");
    }
    const double floor = gap_floor(p);
    std::vector<Vector> states(static_cast<size_t>(n_k));
    for (int j = 0; j < n_k; ++j) {
        const double k = -kPi + 2.0 * kPi * j / n_k;
        const BlochBands bands = bloch_bands(p, k, phi);
        if (bands.energy_high - bands.energy_low < floor) {
            std::ostringstream msg;
            msg << "polarization: gap closes at k = " << k << ", phi = " << phi;
            throw TopologyError(msg.str());
        }
        Vector v = bands.low;
        fix_gauge(v);
        if (gauge_phase) {
            v *= gauge_phase(j) / std::abs(gauge_phase(j));
        }
        states[static_cast<size_t>(j)] = v;
    }

    Complex wilson(1.0, 0.0);
    for (int j = 0; j < n_k; ++j) {
        const int j1 = (j + 1) % n_k;
        const Complex u = states[static_cast<size_t>(j)].dot(
            states[static_cast<size_t>(j1)]);
        if (std::abs(u) < 1e-12) {
            throw TopologyError("polarization: vanishing Wilson link; refine the k grid");
        }
        wilson *= u / std::abs(u);
    }
    double value = -std::arg(wilson) / (2.0 * kPi);
    value -= std::floor(value);
    if (value >= 1.0) {
        value -= 1.0;
    }
    return value;
}

double pumped_charge(const models::RiceMeleParams& p, int n_phi, int n_k, int direction)
{
    if (n_phi < 8) {
        throw TopologyError("pumped_charge: need at least eight phi points");
    }
    if (direction != 1 && direction != -1) {
        throw TopologyError("pumped_charge: direction must be +1 or -1");
    }
    double total = 0.0;
    double prev = polarization(p, 0.0, n_k);
    for (int m = 1; m <= n_phi; ++m) {
        const double phi = direction * 2.0 * kPi * m / n_phi;
        const double cur = polarization(p, phi, n_k);
        double jump = cur - prev;
        jump -= std::round(jump); // minimal-image branch continuation
        if (std::abs(jump) >= 0.5 - 1e-9) {
            std::ostringstream msg;
            msg << "pumped_charge: polarization jumps by " << jump << " at phi = " << phi
                << "; refine the phi grid";
            throw TopologyError(msg.str());
        }
        total += jump;
        prev = cur;
    }
    return total;
}

} // namespace adishort::topology
