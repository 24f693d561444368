#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adishort::spectral {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Raised on solver failure or on a violated structural precondition
// (non-finite input, degenerate spectrum, ambiguous level matching).
class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Largest matrix dimension the dense solver accepts.
inline constexpr int kMaxDim = 256;

// Relative eigenvalue separation below which a spectrum counts as degenerate.
inline constexpr double kDegeneracyTol = 1e-8;

// Eigendecomposition of one dense complex matrix.
//
// Eigenvalues are sorted by ascending real part, ties broken by ascending
// imaginary part; the same ordering applies to the vector columns.  Right
// vectors have unit Euclidean norm.  Left vectors are filled in by
// biorthogonalize(); until then `left` is empty and `biorthogonal` is false.
struct EigenSystem {
    Vector values;
    Matrix right;                   // column i holds |phi_i>
    Matrix left;                    // column i holds |phi~_i>
    double matrix_norm = 0.0;       // Frobenius norm of the source matrix
    double residual_norm = 0.0;     // max_i ||H phi_i - E_i phi_i|| / matrix_norm
    double pairing_residual = -1.0; // max_ij |<phi~_i|phi_j> - delta_ij|
    bool biorthogonal = false;

    int dim() const { return static_cast<int>(values.size()); }
};

// Full spectrum of a dense complex (generally non-Hermitian) matrix.
// Rejects NaN/Inf input and dimensions outside [1, kMaxDim]; reports the
// dimension and achieved residual if the iteration fails to converge.
EigenSystem eig_dense(const Matrix& h);

// Rescales an eigensystem so that <phi~_i|phi_j> = delta_ij.
//
// Right vectors keep unit norm and get a deterministic phase (largest-modulus
// entry real positive); left vectors come from the inverse of the right-vector
// matrix, so the pairing holds by construction up to solve roundoff (recorded
// in pairing_residual).  Fails when two eigenvalues are closer than
// kDegeneracyTol * matrix_norm, naming the offending pair.
EigenSystem biorthogonalize(EigenSystem sys);

struct SweepPoint {
    double control = 0.0;
    EigenSystem system;
};

// Relabels the levels of a parameter sweep so that level i follows one
// physical eigenvector across grid points: at each step the permutation
// maximizes |<phi~_i(m)|phi_j(m+1)>| under a bijection constraint.
//
// Requires biorthogonalized input.  Fails when the best and second-best
// overlaps for some level differ by less than 0.05 (ambiguous matching), or
// when the matched right-vector overlap drops to 0.7 or below; both failures
// advise a finer control grid.
std::vector<SweepPoint> track_levels(std::vector<SweepPoint> sweep);

} // namespace adishort::spectral
