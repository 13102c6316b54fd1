#include "ptzgs/graph.hpp"

#include <cmath>
#include <string>

#include "ptzgs/errors.hpp"

namespace ptzgs {

Graph::Graph(Matrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) {
        throw DimensionMismatch("Graph: adjacency matrix is not square");
    }
    const auto n = weights_.rows();
    if (n < 2) throw ValidationError("Graph: at least two agents are required");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weights_(i, i) != 0.0) {
            throw ValidationError("Graph: nonzero diagonal weight at agent " + std::to_string(i + 1));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw ValidationError("Graph: weights must be finite and nonnegative");
            }
            if (w != weights_(j, i)) throw ValidationError("Graph: weights are not symmetric");
        }
    }
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
    if (n < 2) throw ValidationError("Graph: at least two agents are required");
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const Edge& e : edges) {
        const std::string label =
            "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ")";
        if (e.i < 1 || e.j < 1 || e.i > n || e.j > n) {
            throw ValidationError("Graph: " + label + " has an agent index outside 1.." +
                                  std::to_string(n));
        }
        if (e.i == e.j) throw ValidationError("Graph: self-loop " + label);
        if (!std::isfinite(e.weight) || e.weight <= 0.0) {
            throw ValidationError("Graph: " + label + " must have a positive finite weight");
        }
        const auto i = static_cast<Eigen::Index>(e.i - 1);
        const auto j = static_cast<Eigen::Index>(e.j - 1);
        if (a(i, j) != 0.0) throw ValidationError("Graph: duplicate " + label);
        a(i, j) = e.weight;
        a(j, i) = e.weight;
    }
    return Graph(std::move(a));
}

Graph Graph::path(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < n; ++i) edges.push_back({i, i + 1, 1.0});
    return from_edges(n, edges);
}

Graph Graph::ring(std::size_t n) {
    if (n < 3) return path(n);
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= n; ++i) edges.push_back({i, i % n + 1, 1.0});
    return from_edges(n, edges);
}

Graph Graph::complete(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) edges.push_back({i, j, 1.0});
    return from_edges(n, edges);
}

std::vector<std::size_t> Graph::neighbors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j)
        if (weight(i, j) > 0.0) out.push_back(j);
    return out;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j)
            if (weight(i, j) > 0.0) out.push_back({i + 1, j + 1, weight(i, j)});
    return out;
}

Matrix laplacian(const Graph& g) {
    const Matrix& a = g.weights();
    Matrix l = -a;
    l.diagonal() = a.rowwise().sum();
    return l;
}

SpectralInfo spectrum(const Graph& g) {
    SpectralInfo info;
    info.laplacian = laplacian(g);
    info.eigenvalues = symmetric_eigenvalues(info.laplacian);
    info.lambda2 = info.eigenvalues(1);
    return info;
}

void assert_connected(const SpectralInfo& info) {
    if (!(info.lambda2 > kEigenTolerance)) {
        throw DisconnectedGraph("graph is disconnected (lambda2 = " + std::to_string(info.lambda2) +
                                ")");
    }
}

void assert_connected(const Graph& g) { assert_connected(spectrum(g)); }

double consensus_quadratic_form(const Graph& g, std::span<const Vector> blocks) {
    if (blocks.size() != g.size()) {
        throw DimensionMismatch("consensus_quadratic_form: expected " + std::to_string(g.size()) +
                                " blocks, got " + std::to_string(blocks.size()));
    }
    const auto dim = blocks.front().size();
    for (const Vector& b : blocks) {
        if (b.size() != dim) throw DimensionMismatch("consensus_quadratic_form: ragged blocks");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            if (const double w = g.weight(i, j); w != 0.0) sum += w * (blocks[i] - blocks[j]).squaredNorm();
    return sum;
}

double consensus_quadratic_form(const Graph& g, const Vector& stacked, std::size_t block_dim) {
    if (block_dim == 0 || static_cast<std::size_t>(stacked.size()) != g.size() * block_dim) {
        throw DimensionMismatch("consensus_quadratic_form: stacked vector has wrong length");
    }
    std::vector<Vector> blocks;
    blocks.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        blocks.emplace_back(stacked.segment(static_cast<Eigen::Index>(i * block_dim),
                                            static_cast<Eigen::Index>(block_dim)));
    return consensus_quadratic_form(g, blocks);
}

Matrix complete_graph_laplacian(std::size_t n) {
    const auto m = static_cast<Eigen::Index>(n);
    return static_cast<double>(n) * Matrix::Identity(m, m) - Matrix::Ones(m, m);
}

}  // namespace ptzgs
