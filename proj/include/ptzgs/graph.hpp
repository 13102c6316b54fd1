#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ptzgs/linalg.hpp"

namespace ptzgs {

/// Zero-eigenvalue and connectivity tolerance.
inline constexpr double kEigenTolerance = 1e-9;

/// Undirected edge with 1-based agent indices.
struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 1.0;
};

/// Weighted undirected graph stored as a dense symmetric adjacency matrix.
/// Immutable after construction.
class Graph {
public:
    /// Validates symmetry, zero diagonal, nonnegative finite weights and n >= 2.
    explicit Graph(Matrix weights);

    /// Builds a graph from 1-based edges. Self-loops, duplicate edges,
    /// out-of-range indices and non-positive weights are rejected.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges);

    static Graph path(std::size_t n);
    static Graph ring(std::size_t n);
    static Graph complete(std::size_t n);

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
    const Matrix& weights() const noexcept { return weights_; }
    std::vector<std::size_t> neighbors(std::size_t i) const;
    std::vector<Edge> edges() const;

private:
    Matrix weights_;
};

struct SpectralInfo {
    Matrix laplacian;
    Vector eigenvalues;  // ascending
    double lambda2 = 0.0;
};

/// L = D - A.
Matrix laplacian(const Graph& g);

SpectralInfo spectrum(const Graph& g);

/// Throws DisconnectedGraph when the Fiedler value is at or below kEigenTolerance.
void assert_connected(const Graph& g);
void assert_connected(const SpectralInfo& info);

/// x^T (L (x) I) x evaluated edge-wise as 1/2 sum_ij a_ij |x_i - x_j|^2.
double consensus_quadratic_form(const Graph& g, std::span<const Vector> blocks);
double consensus_quadratic_form(const Graph& g, const Vector& stacked, std::size_t block_dim);

/// Laplacian of the complete graph on n nodes: n I - 1 1^T.
Matrix complete_graph_laplacian(std::size_t n);

}  // namespace ptzgs
