#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "adishort/models.hpp"

namespace adishort::topology {

using spectral::Complex;
using spectral::Matrix;
using spectral::Vector;

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Closed (k, phi) torus discretization; k uniform on [-pi, pi), phi uniform on
// [0, 2pi), last plaquette wrapping around in both directions.
struct BlochGrid {
    int n_k = 64;
    int n_phi = 64;
    int band_index = 0; // 0 = lower (occupied) band

    double k_at(int j) const;
    double phi_at(int m) const;
};

// Two-band Bloch matrix of the pump chain:
//   [[ Delta(phi),            t1 + t2 e^{-ik} ],
//    [ conj(t1 + t2 e^{-ik}), -Delta(phi)     ]]
// with t1/t2 = t0 +/- delta0 cos(phi) and Delta = Delta0 sin(phi).  The
// intercell phase sits on t2; this fixes every Berry-phase sign downstream.
Matrix bloch_hamiltonian(const models::RiceMeleParams& p, double k, double phi);

// Occupied-band eigenvector with the deterministic gauge (first nonzero
// component real positive).
Vector occupied_state(const models::RiceMeleParams& p, double k, double phi,
                      int band_index = 0);

// First Chern number of the chosen band over the (k, phi) torus via
// plaquette-summed link variables.  Gauge invariant by construction; fails if
// the gap closes on the grid or the summed curvature misses an integer by
// more than 1e-3 (grid too coarse).  The optional gauge hook exists for the
// gauge-independence tests.
int chern_number(const models::RiceMeleParams& p, const BlochGrid& grid,
                 const std::function<Complex(int, int)>& gauge_phase = {});

// Berry curvature field F_{k,phi} per plaquette, for CSV export.
struct CurvatureField {
    std::vector<double> k;
    std::vector<double> phi;
    std::vector<double> f; // curvature of plaquette (k_j, phi_m)
};
CurvatureField berry_curvature(const models::RiceMeleParams& p, const BlochGrid& grid);

// Polarization of the occupied band at fixed phi: discrete Wilson loop over
// the k ring, returned in [0, 1).
double polarization(const models::RiceMeleParams& p, double phi, int n_k,
                    const std::function<Complex(int)>& gauge_phase = {});

// Unwrapped winding of the polarization over one pump cycle; equals the Chern
// number for a gapped cycle.  direction = -1 traverses the cycle backwards.
double pumped_charge(const models::RiceMeleParams& p, int n_phi, int n_k,
                     int direction = +1);

} // namespace adishort::topology
