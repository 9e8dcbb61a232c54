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

#include "agcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "agcn/error.hpp"

namespace agcn {

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (std::size_t r = 0; r < adjacency_.rows; ++r)
        for (std::size_t p = adjacency_.row_begin(r); p < adjacency_.row_end(r); ++p)
            if (adjacency_.col_indices[p] > r) out.push_back({r, adjacency_.col_indices[p], adjacency_.values[p]});
    return out;
}

Graph build_graph(std::size_t n, std::span<const Edge> edges) {
    if (n == 0) fail(Errc::invalid_argument, "build_graph: graph must have at least one node");

    struct Entry {
        std::size_t row, col;
        double weight;
    };
    std::vector<Entry> entries;
    entries.reserve(edges.size() * 2);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        const std::string where = "build_graph: edge " + std::to_string(e) + " (" + std::to_string(edge.src) + ", " +
                                  std::to_string(edge.dst) + ")";
        if (edge.src >= n || edge.dst >= n) fail(Errc::index_out_of_range, where + ": endpoint out of range");
        if (edge.src == edge.dst) fail(Errc::self_loop, where + ": self-loop");
        if (!std::isfinite(edge.weight)) fail(Errc::non_finite, where + ": non-finite weight");
        if (edge.weight <= 0.0) fail(Errc::nonpositive_weight, where + ": nonpositive weight");
        entries.push_back({edge.src, edge.dst, edge.weight});
        entries.push_back({edge.dst, edge.src, edge.weight});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col)
            fail(Errc::duplicate_edge, "build_graph: duplicate edge (" + std::to_string(std::min(entries[i].row, entries[i].col)) +
                                           ", " + std::to_string(std::max(entries[i].row, entries[i].col)) + ")");

    Graph g;
    CsrMatrix& adj = g.adjacency_;
    adj.rows = adj.cols = n;
    adj.row_offsets.assign(n + 1, 0);
    adj.col_indices.reserve(entries.size());
    adj.values.reserve(entries.size());
    for (const Entry& e : entries) {
        ++adj.row_offsets[e.row + 1];
        adj.col_indices.push_back(e.col);
        adj.values.push_back(e.weight);
    }
    std::partial_sum(adj.row_offsets.begin(), adj.row_offsets.end(), adj.row_offsets.begin());
    return g;
}

NormalizedGraph normalize(const Graph& g) {
    const std::size_t n = g.num_nodes();
    const CsrMatrix& a = g.adjacency();

    NormalizedGraph ng;
    ng.base = g;
    ng.degree.assign(n, 1.0);

    // Ã = A + I: merge the unit diagonal into each sorted row.
    CsrMatrix& looped = ng.self_looped;
    looped.rows = looped.cols = n;
    looped.row_offsets.assign(1, 0);
    looped.col_indices.reserve(a.nnz() + n);
    looped.values.reserve(a.nnz() + n);
    for (std::size_t r = 0; r < n; ++r) {
        bool diagonal_done = false;
        for (std::size_t p = a.row_begin(r); p < a.row_end(r); ++p) {
            const std::size_t c = a.col_indices[p];
            if (!diagonal_done && c > r) {
                looped.col_indices.push_back(r);
                looped.values.push_back(1.0);
                diagonal_done = true;
            }
            looped.col_indices.push_back(c);
            looped.values.push_back(a.values[p]);
        }
        if (!diagonal_done) {
            looped.col_indices.push_back(r);
            looped.values.push_back(1.0);
        }
        looped.row_offsets.push_back(looped.col_indices.size());
    }

    for (std::size_t r = 0; r < n; ++r) {
        double d = 0.0;
        for (std::size_t p = looped.row_begin(r); p < looped.row_end(r); ++p) d += looped.values[p];
        ng.degree[r] = d;
    }

    ng.sym_norm = looped;
    ng.laplacian = looped;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t p = looped.row_begin(r); p < looped.row_end(r); ++p) {
            const std::size_t c = looped.col_indices[p];
            ng.sym_norm.values[p] = looped.values[p] / std::sqrt(ng.degree[r] * ng.degree[c]);
            ng.laplacian.values[p] = c == r ? ng.degree[r] - looped.values[p] : -looped.values[p];
        }
    }
    return ng;
}

double smoothness_trace(const NormalizedGraph& ng, const Matrix& h) {
    if (h.rows() != ng.num_nodes())
        fail(Errc::shape_mismatch, "smoothness_trace: H has " + std::to_string(h.rows()) + " rows, graph has " +
                                       std::to_string(ng.num_nodes()) + " nodes");
    // Self-loop terms vanish, so only off-diagonal entries of Ã contribute.
    const CsrMatrix& a = ng.base.adjacency();
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        auto hi = h.row(i);
        for (std::size_t p = a.row_begin(i); p < a.row_end(i); ++p) {
            auto hj = h.row(a.col_indices[p]);
            double dist = 0.0;
            for (std::size_t f = 0; f < hi.size(); ++f) {
                const double d = hi[f] - hj[f];
                dist += d * d;
            }
            total += a.values[p] * dist;
        }
    }
    return 0.5 * total;
}

Matrix smoothness_trace_gradient(const NormalizedGraph& ng, const Matrix& h) {
    if (h.rows() != ng.num_nodes())
        fail(Errc::shape_mismatch, "smoothness_trace_gradient: H has " + std::to_string(h.rows()) +
                                       " rows, graph has " + std::to_string(ng.num_nodes()) + " nodes");
    Matrix g = spmm(ng.laplacian, h);
    scale_inplace(g, 2.0);
    return g;
}

Graph knn_graph(const Matrix& x, std::size_t k) {
    const std::size_t n = x.rows();
    if (k == 0) fail(Errc::invalid_argument, "knn_graph: k must be positive");
    if (k >= n) fail(Errc::invalid_argument, "knn_graph: k=" + std::to_string(k) + " needs more than k nodes, got " +
                                                  std::to_string(n));
    require_finite(x, "knn_graph features");

    std::vector<std::pair<std::size_t, std::size_t>> directed;
    directed.reserve(n * k);
    std::vector<std::pair<double, std::size_t>> candidates(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = x.row(i);
        std::size_t slot = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            auto xj = x.row(j);
            double dist = 0.0;
            for (std::size_t f = 0; f < xi.size(); ++f) {
                const double d = xi[f] - xj[f];
                dist += d * d;
            }
            candidates[slot++] = {dist, j};
        }
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
        for (std::size_t m = 0; m < k; ++m) {
            const std::size_t j = candidates[m].second;
            directed.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    std::vector<Edge> edges;
    edges.reserve(directed.size());
    for (auto [a, b] : directed) edges.push_back({a, b, 1.0});
    return build_graph(n, edges);
}

}  // namespace agcn
