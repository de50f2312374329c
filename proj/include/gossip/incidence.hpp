#pragma once

#include "gossip/graph.hpp"
#include "gossip/linalg.hpp"

#include <span>
#include <vector>

namespace gossip {

/// The m x n edge-node incidence matrix A of a graph, with an implicit zero
/// right-hand side. Row e for edge (i, j), i < j, holds +1 at column i and
/// -1 at column j, so A x = 0 exactly when x is constant.
class IncidenceSystem {
public:
    explicit IncidenceSystem(const Graph& g);

    std::size_t rows() const noexcept { return edges_.size(); }
    std::size_t cols() const noexcept { return n_; }
    std::span<const Edge> edges() const noexcept { return edges_; }

    /// Dense copy of A.
    const linalg::DenseMatrix& matrix() const noexcept { return a_; }

    /// (A x)_e = x_i - x_j.
    double row_dot(EdgeId e, std::span<const double> x) const;
    std::vector<double> apply(std::span<const double> x) const;
    /// A^T y, accumulated edge by edge.
    std::vector<double> apply_transpose(std::span<const double> y) const;

    /// Principal submatrix (A A^T)[S, S]: 2 on the diagonal, +-1 where two
    /// selected edges share an endpoint.
    linalg::DenseMatrix gram_submatrix(std::span<const EdgeId> selected) const;

    /// Pseudoinverse of gram_submatrix(selected), given the connected
    /// components of the selected edges. Uses the per-component identity
    /// (A A^T)^+ = A (L^+)^2 A^T with L^+ = (L + J/p)^{-1} - J/p, which avoids
    /// an eigensolve.
    linalg::DenseMatrix gram_pseudoinverse(std::span<const EdgeId> selected,
                                           std::span<const Component> components) const;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    linalg::DenseMatrix a_;
};

inline IncidenceSystem incidence(const Graph& g) { return IncidenceSystem(g); }

} // namespace gossip
