#include "adishort/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace adishort::spectral {

namespace {

bool all_finite(const Matrix& h)
{
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
            const Complex& z = h(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                return false;
            }
        }
    }
    return true;
}

// Strict weak ordering: ascending real part, ties by ascending imaginary part.
bool value_less(const Complex& a, const Complex& b)
{
    if (a.real() != b.real()) {
        return a.real() < b.real();
    }
    return a.imag() < b.imag();
}

} // namespace

EigenSystem eig_dense(const Matrix& h)
{
    const int n = static_cast<int>(h.rows());
    if (n < 1 || h.cols() != h.rows()) {
        throw SpectralError("eig_dense: matrix must be square and nonempty");
    }
    if (n > kMaxDim) {
        std::ostringstream msg;
        msg << "eig_dense: dimension " << n << " exceeds the design ceiling " << kMaxDim;
        throw SpectralError(msg.str());
    }
    if (!all_finite(h)) {
        throw SpectralError("eig_dense: input contains NaN or Inf entries");
    }

    EigenSystem sys;
    sys.matrix_norm = h.norm();

    if (n == 1) {
        sys.values = Vector::Constant(1, h(0, 0));
        sys.right = Matrix::Identity(1, 1);
        sys.residual_norm = 0.0;
        return sys;
    }

    Eigen::ComplexEigenSolver<Matrix> solver(h, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eig_dense: QR iteration failed to converge for dimension " << n;
        throw SpectralError(msg.str());
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const Vector& raw_values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return value_less(raw_values(a), raw_values(b));
    });

    sys.values.resize(n);
    sys.right.resize(n, n);
    for (int i = 0; i < n; ++i) {
        sys.values(i) = raw_values(order[static_cast<size_t>(i)]);
        Vector v = solver.eigenvectors().col(order[static_cast<size_t>(i)]);
        sys.right.col(i) = v / v.norm();
    }

    const double scale = sys.matrix_norm > 0.0 ? sys.matrix_norm : 1.0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double res = (h * sys.right.col(i) - sys.values(i) * sys.right.col(i)).norm();
        worst = std::max(worst, res / scale);
    }
    sys.residual_norm = worst;
    if (!(worst <= 1e-10)) {
        std::ostringstream msg;
        msg << "eig_dense: residual " << worst << " exceeds 1e-10 for dimension " << n;
        throw SpectralError(msg.str());
    }
    return sys;
}

EigenSystem biorthogonalize(EigenSystem sys)
{
    const int n = sys.dim();
    if (n == 0 || sys.right.cols() != n) {
        throw SpectralError("biorthogonalize: empty or inconsistent eigensystem");
    }

    const double scale = sys.matrix_norm > 0.0 ? sys.matrix_norm : 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(sys.values(i) - sys.values(j)) < kDegeneracyTol * scale) {
                std::ostringstream msg;
                msg << "biorthogonalize: eigenvalues " << i << " and " << j
                    << " are degenerate within " << kDegeneracyTol << " * ||H|| ("
                    << sys.values(i) << " vs " << sys.values(j) << ")";
                throw SpectralError(msg.str());
            }
        }
    }

    // Deterministic gauge: rotate each right vector so its largest-modulus
    // entry is real positive, keeping unit norm.
    for (int i = 0; i < n; ++i) {
        Vector v = sys.right.col(i);
        int anchor = 0;
        double best = -1.0;
        for (int r = 0; r < n; ++r) {
            const double mag = std::abs(v(r));
            if (mag > best) {
                best = mag;
                anchor = r;
            }
        }
        const Complex z = v(anchor);
        if (std::abs(z) > 0.0) {
            v *= std::conj(z) / std::abs(z);
        }
        sys.right.col(i) = v / v.norm();
    }

    // Rows of right^-1 are the left eigenvectors in bra form; storing their
    // adjoints as kets makes <phi~_i|phi_j> = (left^H right)_ij = delta_ij.
    Eigen::PartialPivLU<Matrix> lu(sys.right);
    const Matrix inv = lu.inverse();
    if (!all_finite(inv)) {
        throw SpectralError("biorthogonalize: right-vector matrix is numerically singular");
    }
    sys.left = inv.adjoint();

    const Matrix pairing = sys.left.adjoint() * sys.right;
    sys.pairing_residual = (pairing - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    sys.biorthogonal = true;
    return sys;
}

std::vector<SweepPoint> track_levels(std::vector<SweepPoint> sweep)
{
    if (sweep.empty()) {
        return sweep;
    }
    for (const SweepPoint& p : sweep) {
        if (!p.system.biorthogonal) {
            throw SpectralError("track_levels: sweep entries must be biorthogonalized");
        }
    }
    const int n = sweep.front().system.dim();

    for (size_t m = 0; m + 1 < sweep.size(); ++m) {
        const EigenSystem& cur = sweep[m].system;
        EigenSystem& nxt = sweep[m + 1].system;
        if (nxt.dim() != n) {
            throw SpectralError("track_levels: inconsistent dimensions across the sweep");
        }

        const Eigen::MatrixXd overlap = (cur.left.adjoint() * nxt.right).cwiseAbs();

        // Greedy assignment, largest overlaps first; each row must have a
        // clear winner among the still-unassigned columns.
        std::vector<int> row_order(static_cast<size_t>(n));
        std::iota(row_order.begin(), row_order.end(), 0);
        std::stable_sort(row_order.begin(), row_order.end(), [&](int a, int b) {
            return overlap.row(a).maxCoeff() > overlap.row(b).maxCoeff();
        });

        std::vector<int> match(static_cast<size_t>(n), -1);
        std::vector<bool> taken(static_cast<size_t>(n), false);
        for (int row : row_order) {
            int best_col = -1;
            double best = -1.0;
            double second = -1.0;
            for (int col = 0; col < n; ++col) {
                if (taken[static_cast<size_t>(col)]) {
                    continue;
                }
                const double v = overlap(row, col);
                if (v > best) {
                    second = best;
                    best = v;
                    best_col = col;
                } else if (v > second) {
                    second = v;
                }
            }
            if (second >= 0.0 && best - second < 0.05) {
                std::ostringstream msg;
                msg << "track_levels: ambiguous match for level " << row
                    << " between control=" << sweep[m].control << " and "
                    << sweep[m + 1].control << " (overlaps " << best << " vs " << second
                    << "); use a finer control grid";
                throw SpectralError(msg.str());
            }
            match[static_cast<size_t>(row)] = best_col;
            taken[static_cast<size_t>(best_col)] = true;
        }

        for (int row = 0; row < n; ++row) {
            const int col = match[static_cast<size_t>(row)];
            const double plain =
                std::abs(cur.right.col(row).dot(nxt.right.col(col)));
            if (!(plain > 0.7)) {
                std::ostringstream msg;
                msg << "track_levels: matched right-vector overlap " << plain
                    << " for level " << row << " at control=" << sweep[m + 1].control
                    << " is below 0.7; use a finer control grid";
                throw SpectralError(msg.str());
            }
        }

        EigenSystem permuted;
        permuted.values.resize(n);
        permuted.right.resize(n, n);
        permuted.left.resize(n, n);
        permuted.matrix_norm = nxt.matrix_norm;
        permuted.residual_norm = nxt.residual_norm;
        permuted.pairing_residual = nxt.pairing_residual;
        permuted.biorthogonal = nxt.biorthogonal;
        for (int row = 0; row < n; ++row) {
            const int col = match[static_cast<size_t>(row)];
            permuted.values(row) = nxt.values(col);
            permuted.right.col(row) = nxt.right.col(col);
            permuted.left.col(row) = nxt.left.col(col);
        }
        nxt = std::move(permuted);
    }
    return sweep;
}

} // namespace adishort::spectral
