#pragma once

#include <Eigen/Dense>

namespace ptzgs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Eigenvalues of a symmetric matrix in ascending order, computed with cyclic
/// Jacobi rotations. Iteration stops once the off-diagonal Frobenius norm drops
/// below `rel_tol` times the Frobenius norm of the input.
///
/// Throws ConvergenceFailure after `max_sweeps` full sweeps, DimensionMismatch
/// for non-square input, and ValidationError for non-symmetric input.
Vector symmetric_eigenvalues(const Matrix& a, double rel_tol = 1e-15, int max_sweeps = 100);

bool all_finite(const Vector& v);

}  // namespace ptzgs
