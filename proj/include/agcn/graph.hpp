/*
   Copyright 2026 The AGCN Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "agcn/linalg.hpp"

namespace agcn {

struct Edge {
    std::size_t src;
    std::size_t dst;
    double weight;
};

/// Undirected weighted graph without self-loops. The adjacency is stored in
/// both directions, so it is symmetric by construction.
class Graph {
public:
    Graph() = default;

    std::size_t num_nodes() const noexcept { return adjacency_.rows; }
    /// Number of undirected edges.
    std::size_t num_edges() const noexcept { return adjacency_.nnz() / 2; }
    const CsrMatrix& adjacency() const noexcept { return adjacency_; }

    /// Undirected edges with src < dst, in lexicographic order.
    std::vector<Edge> edges() const;

private:
    friend Graph build_graph(std::size_t n, std::span<const Edge> edges);
    CsrMatrix adjacency_;
};

/// Rejects out-of-range endpoints, self-loops, nonpositive or non-finite
/// weights and duplicate undirected pairs, each with its own Errc.
Graph build_graph(std::size_t n, std::span<const Edge> edges);

/// Self-looped and normalized forms of a graph:
///   self_looped = A + I, degree = row sums of A + I,
///   sym_norm    = D^-1/2 (A + I) D^-1/2,
///   laplacian   = D - (A + I).
struct NormalizedGraph {
    Graph base;
    CsrMatrix self_looped;
    std::vector<double> degree;
    CsrMatrix sym_norm;
    CsrMatrix laplacian;

    std::size_t num_nodes() const noexcept { return base.num_nodes(); }
};

NormalizedGraph normalize(const Graph& g);

/// tr(Hᵀ L H) evaluated as ½ Σ_ij Ã_ij ‖h_i − h_j‖² over stored edges.
double smoothness_trace(const NormalizedGraph& ng, const Matrix& h);
/// Gradient of smoothness_trace with respect to H, i.e. 2 L H.
Matrix smoothness_trace_gradient(const NormalizedGraph& ng, const Matrix& h);

/// Directed k-nearest-neighbour graph under Euclidean distance, symmetrized
/// by union with unit weights. Distance ties go to the smaller node index.
Graph knn_graph(const Matrix& x, std::size_t k);

}  // namespace agcn
