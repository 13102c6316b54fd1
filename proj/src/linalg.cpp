#include "ptzgs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptzgs/errors.hpp"

namespace ptzgs {

Vector symmetric_eigenvalues(const Matrix& a, double rel_tol, int max_sweeps) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("symmetric_eigenvalues: matrix is not square");
    }
    const Eigen::Index n = a.rows();
    if (n == 0) return Vector{};
    const double scale = a.norm();
    if (!std::isfinite(scale)) throw NonFiniteInput("symmetric_eigenvalues: non-finite entry");
    if ((a - a.transpose()).norm() > 1e-12 * std::max(1.0, scale)) {
        throw ValidationError("symmetric_eigenvalues: matrix is not symmetric");
    }

    Matrix m = 0.5 * (a + a.transpose());
    const double target = rel_tol * std::max(scale, 1e-300);

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * m(p, q) * m(p, q);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > target) {
        if (sweep++ >= max_sweeps) {
            throw ConvergenceFailure("symmetric_eigenvalues: no convergence after " +
                                     std::to_string(max_sweeps) + " Jacobi sweeps");
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                // Rotation angle that annihilates m(p, q) (Rutishauser's formulation).
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                m(p, q) = 0.0;
                m(q, p) = 0.0;
            }
        }
    }

    Vector eig = m.diagonal();
    std::sort(eig.begin(), eig.end());
    return eig;
}

bool all_finite(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace ptzgs
