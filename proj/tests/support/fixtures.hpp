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

// Synthetic graphs and datasets shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "agcn/dataset.hpp"
#include "agcn/graph.hpp"
#include "agcn/linalg.hpp"

namespace agcn::testing {

// Erdős–Rényi graph; edge weights uniform in [0.5, 2] when weighted.
inline Graph random_graph(Rng& rng, std::size_t n, double p, bool weighted = false) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) edges.push_back({i, j, weighted ? rng.uniform(0.5, 2.0) : 1.0});
    return build_graph(n, edges);
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.uniform(lo, hi);
    return m;
}

// Two 5-node cliques joined by the edge 4–5. Features are one-hot node ids,
// labels are clique ids, node 0 and node 9 are the only training nodes.
inline Dataset two_clique_dataset() {
    Dataset ds;
    ds.name = "two-clique";
    std::vector<Edge> edges;
    for (std::size_t base : {0u, 5u})
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = i + 1; j < 5; ++j) edges.push_back({base + i, base + j, 1.0});
    edges.push_back({4, 5, 1.0});
    ds.graph = build_graph(10, edges);
    ds.features = Matrix::identity(10);
    ds.labels = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    ds.num_classes = 2;
    ds.splits.train = {0, 9};
    ds.splits.val = {1, 2, 7, 8};
    ds.splits.test = {3, 4, 5, 6};
    return ds;
}

struct CitationLikeOptions {
    std::size_t nodes = 600;
    std::size_t classes = 4;
    std::size_t features = 120;
    double avg_degree = 4.0;
    // Fraction of a node's edges that stay inside its class.
    double homophily = 0.85;
    std::size_t words_per_node = 8;
    // Probability a word comes from the node's class vocabulary.
    double topic_purity = 0.35;
    std::size_t train_per_class = 5;
    std::size_t val = 150;
    std::size_t test = 300;
    std::uint64_t seed = 7;
};

// Stochastic block model with sparse bag-of-words features, shaped like a
// small citation network: labels are weakly predictable from features alone
// and strongly predictable once neighbourhoods are averaged.
inline Dataset citation_like_dataset(const CitationLikeOptions& o = {}) {
    Rng rng(o.seed);
    Dataset ds;
    ds.name = "citation-like";
    ds.num_classes = o.classes;
    ds.labels.resize(o.nodes);
    for (std::size_t i = 0; i < o.nodes; ++i) ds.labels[i] = static_cast<int>(i % o.classes);

    std::vector<std::vector<std::size_t>> by_class(o.classes);
    for (std::size_t i = 0; i < o.nodes; ++i) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const auto target_edges = static_cast<std::size_t>(o.avg_degree * static_cast<double>(o.nodes) / 2.0);
    while (pairs.size() < target_edges * 2) {
        const std::size_t a = rng.uniform_index(o.nodes);
        std::size_t b;
        if (rng.uniform() < o.homophily) {
            const auto& pool = by_class[static_cast<std::size_t>(ds.labels[a])];
            b = pool[rng.uniform_index(pool.size())];
        } else {
            b = rng.uniform_index(o.nodes);
        }
        if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    if (pairs.size() > target_edges) {
        std::shuffle(pairs.begin(), pairs.end(), rng);
        pairs.resize(target_edges);
    }
    std::vector<Edge> edges;
    for (auto [a, b] : pairs) edges.push_back({a, b, 1.0});
    ds.graph = build_graph(o.nodes, edges);

    const std::size_t vocab = o.features / o.classes;
    ds.features = Matrix(o.nodes, o.features);
    for (std::size_t i = 0; i < o.nodes; ++i) {
        const auto c = static_cast<std::size_t>(ds.labels[i]);
        for (std::size_t w = 0; w < o.words_per_node; ++w) {
            const std::size_t word =
                rng.uniform() < o.topic_purity ? c * vocab + rng.uniform_index(vocab) : rng.uniform_index(o.features);
            ds.features(i, word) = 1.0;
        }
    }

    std::vector<std::size_t> order(o.nodes);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> taken(o.classes, 0);
    std::vector<std::size_t> rest;
    for (std::size_t i : order) {
        auto& t = taken[static_cast<std::size_t>(ds.labels[i])];
        if (t < o.train_per_class) {
            ds.splits.train.push_back(i);
            ++t;
        } else {
            rest.push_back(i);
        }
    }
    ds.splits.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(std::min(o.val, rest.size())));
    const std::size_t test_end = std::min(o.val + o.test, rest.size());
    ds.splits.test.assign(rest.begin() + static_cast<std::ptrdiff_t>(ds.splits.val.size()),
                          rest.begin() + static_cast<std::ptrdiff_t>(test_end));
    for (auto* s : {&ds.splits.train, &ds.splits.val, &ds.splits.test}) std::sort(s->begin(), s->end());
    ds.validate();
    return ds;
}

}  // namespace agcn::testing
