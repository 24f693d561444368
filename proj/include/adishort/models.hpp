#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "adishort/spectral.hpp"

namespace adishort::models {

using spectral::Complex;
using spectral::Matrix;
using spectral::Vector;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A driven lattice model: one real control knob R mapped to a dense matrix.
struct DrivenModel {
    int dim = 0;
    std::function<Matrix(double)> build;
    std::string control_name;
    std::map<std::string, double> static_params;

    Matrix operator()(double r) const { return build(r); }
};

// Verifies that build(R) keeps a fixed dimension and stays continuous in R,
// via a finite-difference bound on a sample grid.  Used by tests.
bool continuous_on(const DrivenModel& model, double r0, double r1, int samples,
                   double lipschitz_bound);

// Parameters of the effective two-level reduction: detuning delta0(R) on the
// diagonal, constant couplings omega0 / omega0p off it.  The product
// omega0 * omega0p sets the square of the minimal gap and must not vanish.
struct TwoLevelParams {
    std::function<double(double)> delta0;
    Complex omega0{1.0, 0.0};
    Complex omega0p{1.0, 0.0};

    static TwoLevelParams constant_detuning(double delta, Complex omega0,
                                            Complex omega0p);
    static TwoLevelParams linear_detuning(Complex omega0, Complex omega0p);
};

// (1/2) [[delta0, omega0], [omega0p, -delta0]]; trace is exactly zero.
Matrix effective_two_level(const TwoLevelParams& p, double r);

DrivenModel two_level_model(TwoLevelParams p);

// Complex mixing angles of the two-level system at control value R:
// theta from the right spectrum, theta~ from the conjugate couplings.
// Fails when delta0^2 + omega0*omega0p vanishes (no spectral gap).
struct MixingAngles {
    Complex theta;
    Complex theta_tilde;
};
MixingAngles mixing_angles(const TwoLevelParams& p, double r);

// Right and left eigenvector pairs of the two-level system reconstructed from
// the mixing angle in the coupling-symmetrized frame.  Column 0 is the minus
// branch of +-gap/2, column 1 the plus branch; <left_i|right_j> = delta_ij.
struct TwoLevelVectors {
    Matrix right; // 2x2
    Matrix left;  // 2x2
};
TwoLevelVectors two_level_eigenvectors(const TwoLevelParams& p, double r);

// Non-Hermitian SSH chain on 2N-1 sites, open boundary, site-major basis
// (A1, B1, A2, ...).  Intracell hops are asymmetric: the (A_i, B_i) entry is
// t1 + gamma/2, the (B_i, A_i) entry t1 - gamma/2; intercell hops are t2 both
// ways.  The control parameter is t1.
struct SshParams {
    int n_cells = 2;
    double t2 = 1.0;
    double gamma = 0.0;

    int sites() const { return 2 * n_cells - 1; }
};

DrivenModel nh_ssh(const SshParams& p);

// Control value where the bulk gap around the zero mode closes:
// sqrt(t2^2 + (gamma/2)^2).
double ssh_gap_closing_t1(const SshParams& p);

enum class Side { Left, Right };

// Ideal edge-state target: unit basis vector on site 1 (left) or site 2N-1
// (right); both live on the A sublattice.
Vector edge_target(const SshParams& p, Side side);

// The zero-energy eigenstate at the given t1: unit norm, largest-modulus
// entry rotated real positive.  The exact eigenstate carries a geometric tail
// off the edge site, so its overlap with edge_target is below one.
Vector zero_mode_state(const SshParams& p, double t1);

enum class Boundary { Periodic, Open };

// Rice-Mele pump chain on 2N sites.  Hoppings alternate t0 +/- delta0*cos(phi);
// the staggered on-site energy is +Delta on A and -Delta on B with
// Delta = Delta0*sin(phi).  The control parameter is phi.
struct RiceMeleParams {
    int n_cells = 2;
    double t0 = 1.0;
    double delta0 = 0.0;
    double big_delta0 = 0.0;
    Boundary boundary = Boundary::Periodic;

    int sites() const { return 2 * n_cells; }
    double t1(double phi) const;
    double t2(double phi) const;
    double onsite(double phi) const; // +onsite on A, -onsite on B
};

DrivenModel rice_mele(const RiceMeleParams& p);

} // namespace adishort::models
