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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "agcn/error.hpp"
#include "agcn/model.hpp"
#include "fixtures.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace agcn;
using agcn::testing::random_graph;
using agcn::testing::random_matrix;
using agcn::testing::Instance;
using agcn::testing::fd_error;
using agcn::testing::random_instance;

namespace {

NormalizedGraph two_node() {
    const std::vector<Edge> e{{0, 1, 1.0}};
    return normalize(build_graph(2, e));
}

ModelState hand_model(DiffusionMode mode) {
    ModelState s;
    s.config.layer_dims = {1, 1, 2};
    s.config.beta = 0.5;
    s.config.diffusion = mode;
    s.config.dropout_rate = 0.0;
    s.config.weight_decay = 0.0;
    s.weights = {Matrix::from_rows({{1}}), Matrix::from_rows({{1, 0}})};
    return s;
}

}  // namespace

TEST_CASE("anisotropy_factor") {
    CHECK(anisotropy_factor(0.0, 3.0) == 0.0);
    CHECK(anisotropy_factor(7.0, 0.0) == 0.0);
    CHECK(anisotropy_factor(1.0, 0.5) == doctest::Approx(0.3934693402873666).epsilon(1e-15));
}

TEST_CASE("anisotropy_factor range and monotonicity") {
    Rng rng(404);
    for (int i = 0; i < 10000; ++i) {
        const double t1 = rng.uniform(0, 5), t2 = rng.uniform(0, 5), b1 = rng.uniform(0, 5), b2 = rng.uniform(0, 5);
        const double phi = anisotropy_factor(t1, b1);
        CHECK((phi >= 0.0 && phi <= 1.0));
        // Below this exponent 1 - e^-x is representable as a double below 1.
        if (b1 * t1 * t1 < 36.0) CHECK(phi < 1.0);
        CHECK(anisotropy_factor(std::min(t1, t2), b1) <= anisotropy_factor(std::max(t1, t2), b1));
        CHECK(anisotropy_factor(t1, std::min(b1, b2)) <= anisotropy_factor(t1, std::max(b1, b2)));
    }
}

TEST_CASE("aniso_diffuse") {
    const NormalizedGraph ng = two_node();
    const Matrix h = Matrix::from_rows({{1}, {0}});

    const AnisoDiffusion d = aniso_diffuse(ng, h, 0.5);
    CHECK(d.trace == 1.0);
    CHECK(d.phi == doctest::Approx(0.3934693402873666).epsilon(1e-15));
    CHECK(d.g(0, 0) == doctest::Approx(0.1967346701436833).epsilon(1e-15));
    CHECK(d.g(1, 0) == doctest::Approx(0.1967346701436833).epsilon(1e-15));

    const AnisoDiffusion zero = aniso_diffuse(ng, h, 0.0);
    CHECK(zero.phi == 0.0);
    CHECK(zero.g == Matrix(2, 1));

    const AnisoDiffusion sat = aniso_diffuse(ng, h, 1e9);
    CHECK(max_abs_diff(sat.g, spmm(ng.sym_norm, h)) <= 1e-12);
}

TEST_CASE("aggregation_weight") {
    const NormalizedGraph ng = two_node();
    const double phi = anisotropy_factor(1.0, 0.5);
    CHECK(aggregation_weight(ng, phi, 0, 1) == doctest::Approx(0.1967346701436833).epsilon(1e-15));
    CHECK(aggregation_weight(ng, phi, 0, 0) == aggregation_weight(ng, phi, 0, 1));
    CHECK_THROWS_AS((void)aggregation_weight(ng, phi, 0, 2), Error);

    const std::vector<Edge> e{{0, 1, 1.0}, {1, 2, 1.0}};
    const NormalizedGraph path = normalize(build_graph(3, e));
    CHECK(aggregation_weight(path, 0.7, 0, 2) == 0.0);

    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const NormalizedGraph g = normalize(random_graph(rng, 8, 0.4, true));
        const Matrix h = random_matrix(rng, 8, 2);
        const AnisoDiffusion d = aniso_diffuse(g, h, 0.3);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t f = 0; f < 2; ++f) {
                double s = 0.0;
                for (std::size_t j = 0; j < 8; ++j) s += aggregation_weight(g, d.phi, i, j) * h(j, f);
                CHECK(std::abs(s - d.g(i, f)) <= 1e-12);
            }
    }
}

TEST_CASE("forward hand chain") {
    const NormalizedGraph ng = two_node();
    const Matrix x = Matrix::from_rows({{1}, {0}});
    const ForwardResult r = forward(hand_model(DiffusionMode::input_once), ng, x, nullptr, false);
    const double h = 0.1967346701436833;
    CHECK(r.cache.layers[1].input(0, 0) == doctest::Approx(h).epsilon(1e-14));
    const double p0 = 1.0 / (1.0 + std::exp(-h));
    CHECK(r.probabilities(0, 0) == doctest::Approx(p0).epsilon(1e-14));
    CHECK(r.probabilities(0, 0) == doctest::Approx(0.549).epsilon(1e-3));
    CHECK(r.probabilities(1, 1) == doctest::Approx(0.451).epsilon(1e-3));

    const std::vector<int> labels{1, 1};
    const std::vector<std::size_t> first{0};
    CHECK(cross_entropy(r.probabilities, labels, first) == doctest::Approx(-std::log(1.0 - p0)).epsilon(1e-14));
    CHECK(cross_entropy(r.probabilities, labels, first) == doctest::Approx(0.7963).epsilon(1e-4));
}

TEST_CASE("forward on an isolated node is uniform") {
    const NormalizedGraph ng = normalize(build_graph(1, {}));
    ModelState s;
    s.config.layer_dims = {1, 1, 3};
    s.config.dropout_rate = 0.0;
    s.weights = {Matrix::from_rows({{1}}), Matrix::from_rows({{1, 2, 3}})};
    for (DiffusionMode mode : {DiffusionMode::input_once, DiffusionMode::per_layer}) {
        s.config.diffusion = mode;
        const ForwardResult r = forward(s, ng, Matrix::from_rows({{4}}), nullptr, false);
        for (std::size_t c = 0; c < 3; ++c) CHECK(r.probabilities(0, c) == doctest::Approx(1.0 / 3).epsilon(1e-15));
        CHECK(r.cache.layers[0].phi == 0.0);
    }
}

TEST_CASE("forward matches the dense reference network") {
    Rng rng(90);
    for (int trial = 0; trial < 40; ++trial) {
        const auto mode = trial % 2 ? DiffusionMode::per_layer : DiffusionMode::input_once;
        Instance in = random_instance(rng, mode, 2 + trial % 3);
        in.state.config.kind = trial % 5 == 0 ? ModelKind::gcn : ModelKind::agcn;
        in.state.config.trace_normalize = trial % 7 == 0;
        const Matrix got = forward(in.state, in.ng, in.x, nullptr, false).probabilities;
        const Matrix expect = agcn::testing::reference_forward(in.state, in.graph, in.x);
        CHECK(max_abs_diff(got, expect) <= 1e-12);
        for (std::size_t i = 0; i < got.rows(); ++i) {
            double s = 0.0;
            for (double v : got.row(i)) s += v;
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("saturated per-layer AGCN equals GCN") {
    // The limit needs t > 0 at every layer: a zero trace keeps φ at 0 for
    // any β. Instances with a layer trace below 1e-3 are redrawn.
    Rng rng(2718);
    int checked = 0;
    while (checked < 20) {
        Instance in = random_instance(rng, DiffusionMode::per_layer, 3);
        in.state.config.beta = 1e9;
        const ForwardResult probe = forward(in.state, in.ng, in.x, nullptr, false);
        bool saturated = true;
        for (const LayerCache& lc : probe.cache.layers) saturated = saturated && lc.trace >= 1e-3;
        if (!saturated) continue;
        ++checked;
        ModelState gcn = in.state;
        gcn.config.kind = ModelKind::gcn;
        const Matrix a = forward(in.state, in.ng, in.x, nullptr, false).probabilities;
        CHECK(max_abs_diff(a, agcn::testing::reference_forward(gcn, in.graph, in.x)) <= 1e-9);
    }
}

TEST_CASE("forward argument checks") {
    Rng rng(1);
    Instance in = random_instance(rng, DiffusionMode::per_layer, 2);
    in.state.config.dropout_rate = 0.5;
    CHECK_THROWS_AS((void)forward(in.state, in.ng, in.x, nullptr, true), Error);
    CHECK_NOTHROW((void)forward(in.state, in.ng, in.x, nullptr, false));
    CHECK_THROWS_AS((void)forward(in.state, in.ng, Matrix(in.x.rows(), 5), nullptr, false), Error);
}

TEST_CASE("dropout is inverted and seeded") {
    Rng rng(9);
    Instance in = random_instance(rng, DiffusionMode::input_once, 2);
    in.state.config.dropout_rate = 0.5;
    Rng a(5), b(5);
    const ForwardResult r1 = forward(in.state, in.ng, in.x, &a, true);
    const ForwardResult r2 = forward(in.state, in.ng, in.x, &b, true);
    CHECK(r1.probabilities == r2.probabilities);
    CHECK(r1.cache.layers[0].scale == doctest::Approx(2.0 * r1.cache.layers[0].phi));
    const ForwardResult eval = forward(in.state, in.ng, in.x, nullptr, false);
    CHECK(eval.cache.layers[0].keep.empty());
}

TEST_CASE("cross_entropy") {
    const Matrix onehot = Matrix::from_rows({{0, 1, 0}, {1, 0, 0}});
    const std::vector<int> labels{1, 0};
    const std::vector<std::size_t> both{0, 1};
    CHECK(cross_entropy(onehot, labels, both) == 0.0);

    const Matrix uniform(4, 3, 1.0 / 3);
    const std::vector<int> l4{0, 1, 2, 0};
    const std::vector<std::size_t> m3{0, 2, 3};
    CHECK(cross_entropy(uniform, l4, m3) == doctest::Approx(3 * std::log(3.0)).epsilon(1e-14));

    // Clamped at 1e-12 rather than infinite.
    const std::vector<int> wrong{0, 1};
    CHECK(cross_entropy(onehot, wrong, both) == doctest::Approx(-2 * std::log(1e-12)));

    const auto code = [&](auto fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::invariant_violation;
    };
    CHECK(code([&] { (void)cross_entropy(onehot, labels, {}); }) == Errc::empty_mask);
    const std::vector<int> bad{3, 0};
    CHECK(code([&] { (void)cross_entropy(onehot, bad, both); }) == Errc::label_out_of_range);
}

TEST_CASE("backward matches central finite differences") {
    Rng rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        const auto mode = trial % 2 ? DiffusionMode::per_layer : DiffusionMode::input_once;
        Instance in = random_instance(rng, mode, 2 + trial % 2);
        if (trial % 5 == 0) in.state.config.loss = LossReduction::mean;
        if (trial % 7 == 0) in.state.config.kind = ModelKind::gcn;
        CAPTURE(trial);
        CHECK(fd_error(in, true) <= 1e-5);
    }
}

TEST_CASE("dropping the phi path breaks the per-layer gradient") {
    Rng rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        const Instance in = random_instance(rng, DiffusionMode::per_layer, 2);
        CAPTURE(trial);
        CHECK(fd_error(in, true) <= 1e-5);
        CHECK(fd_error(in, false) > 1e-3);
    }
}

TEST_CASE("dead network has zero upper gradients") {
    Rng rng(6);
    Instance in = random_instance(rng, DiffusionMode::per_layer, 3);
    in.state.config.beta = 0.0;
    in.state.config.weight_decay = 0.0;
    const ForwardResult fwd = forward(in.state, in.ng, in.x, nullptr, false);
    const auto grads = backward(in.state, in.ng, in.x, fwd.cache, in.labels, in.mask);
    for (const Matrix& g : grads) CHECK(g == Matrix(g.rows(), g.cols()));
}

TEST_CASE("gradients are additive over disjoint masks") {
    Rng rng(100);
    for (int trial = 0; trial < 10; ++trial) {
        Instance in = random_instance(rng, trial % 2 ? DiffusionMode::per_layer : DiffusionMode::input_once, 2);
        in.state.config.weight_decay = 0.0;
        std::vector<std::size_t> a, b, all(in.x.rows());
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t i : all) (i % 2 ? a : b).push_back(i);
        const ForwardResult fwd = forward(in.state, in.ng, in.x, nullptr, false);
        const auto ga = backward(in.state, in.ng, in.x, fwd.cache, in.labels, a);
        const auto gb = backward(in.state, in.ng, in.x, fwd.cache, in.labels, b);
        const auto gall = backward(in.state, in.ng, in.x, fwd.cache, in.labels, all);
        for (std::size_t l = 0; l < gall.size(); ++l) {
            Matrix sum = ga[l];
            axpy(sum, 1.0, gb[l]);
            CHECK(max_abs_diff(sum, gall[l]) <= 1e-10);
        }
    }
}

TEST_CASE("backward rejects a stale cache") {
    Rng rng(8);
    Instance in = random_instance(rng, DiffusionMode::input_once, 2);
    const ForwardResult fwd = forward(in.state, in.ng, in.x, nullptr, false);
    ModelState changed = in.state;
    changed.weights[0](0, 0) += 1.0;
    try {
        (void)backward(changed, in.ng, in.x, fwd.cache, in.labels, in.mask);
        FAIL("expected stale_cache");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::stale_cache);
    }
}

TEST_CASE("forward is permutation equivariant") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance in = random_instance(rng, trial % 2 ? DiffusionMode::per_layer : DiffusionMode::input_once, 2);
        const std::size_t n = in.x.rows();
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<Edge> edges;
        for (const Edge& e : in.graph.edges()) edges.push_back({perm[e.src], perm[e.dst], e.weight});
        Matrix px(n, in.x.cols());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t f = 0; f < in.x.cols(); ++f) px(perm[i], f) = in.x(i, f);
        const Matrix y = forward(in.state, in.ng, in.x, nullptr, false).probabilities;
        const Matrix py = forward(in.state, normalize(build_graph(n, edges)), px, nullptr, false).probabilities;
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < y.cols(); ++c) worst = std::max(worst, std::abs(y(i, c) - py(perm[i], c)));
        CHECK(worst <= 1e-10);
    }
}
