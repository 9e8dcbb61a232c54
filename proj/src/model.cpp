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

#include "agcn/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "agcn/error.hpp"

namespace agcn {

namespace {

constexpr double kProbabilityFloor = 1e-12;

std::uint64_t fingerprint_of(const ModelState& state, std::size_t num_nodes) {
    std::uint64_t h = 0xCBF29CE484222325ULL ^ num_nodes;
    for (const Matrix& w : state.weights) {
        h = (h ^ w.rows()) * 0x100000001B3ULL;
        h = (h ^ w.cols()) * 0x100000001B3ULL;
        for (double v : w.values()) h = (h ^ std::bit_cast<std::uint64_t>(v)) * 0x100000001B3ULL;
    }
    return h;
}

double effective_trace(const ModelConfig& cfg, double raw, std::size_t n, std::size_t f) {
    if (!cfg.trace_normalize || n == 0 || f == 0) return raw;
    return raw / (static_cast<double>(n) * static_cast<double>(f));
}

double phi_for(const ModelConfig& cfg, double trace) {
    return cfg.kind == ModelKind::gcn ? 1.0 : anisotropy_factor(trace, cfg.beta);
}

// Z = (scale · keep ⊙ S) · W, skipping zero operands.
Matrix masked_matmul(const Matrix& s, const std::vector<std::uint8_t>& keep, double scale, const Matrix& w) {
    if (s.cols() != w.rows())
        fail(Errc::shape_mismatch, "layer operand has " + std::to_string(s.cols()) + " columns, weight has " +
                                       std::to_string(w.rows()) + " rows");
    Matrix z(s.rows(), w.cols());
    const std::size_t p = w.cols();
    const bool masked = !keep.empty();
    for (std::size_t i = 0; i < s.rows(); ++i) {
        double* dst = z.row(i).data();
        auto srow = s.row(i);
        const std::size_t base = i * s.cols();
        for (std::size_t k = 0; k < srow.size(); ++k) {
            if (srow[k] == 0.0 || (masked && !keep[base + k])) continue;
            const double a = scale * srow[k];
            const double* wrow = w.row(k).data();
            for (std::size_t j = 0; j < p; ++j) dst[j] += a * wrow[j];
        }
    }
    return z;
}

// (scale · keep ⊙ S)ᵀ · dZ
Matrix masked_matmul_tn(const Matrix& s, const std::vector<std::uint8_t>& keep, double scale, const Matrix& dz) {
    Matrix out(s.cols(), dz.cols());
    const std::size_t p = dz.cols();
    const bool masked = !keep.empty();
    for (std::size_t i = 0; i < s.rows(); ++i) {
        auto srow = s.row(i);
        const double* g = dz.row(i).data();
        const std::size_t base = i * s.cols();
        for (std::size_t k = 0; k < srow.size(); ++k) {
            if (srow[k] == 0.0 || (masked && !keep[base + k])) continue;
            const double a = scale * srow[k];
            double* dst = out.row(k).data();
            for (std::size_t j = 0; j < p; ++j) dst[j] += a * g[j];
        }
    }
    return out;
}

std::vector<std::uint8_t> draw_keep_mask(const Matrix& s, double rate, Rng& rng) {
    std::vector<std::uint8_t> keep(s.size(), 0);
    auto v = s.values();
    // Draws only where the operand is nonzero; dropped zeros are indistinguishable from kept ones.
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0.0) keep[i] = rng.uniform() >= rate ? 1 : 0;
    return keep;
}

void check_labels(std::span<const int> labels, std::span<const std::size_t> mask, std::size_t n, std::size_t c) {
    if (mask.empty()) fail(Errc::empty_mask, "loss mask is empty");
    if (labels.size() != n)
        fail(Errc::shape_mismatch, "labels have length " + std::to_string(labels.size()) + ", expected " +
                                       std::to_string(n));
    for (std::size_t i : mask) {
        if (i >= n) fail(Errc::index_out_of_range, "mask index " + std::to_string(i) + " out of range");
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c)
            fail(Errc::label_out_of_range, "label " + std::to_string(labels[i]) + " of node " + std::to_string(i) +
                                               " outside [0, " + std::to_string(c) + ")");
    }
}

}  // namespace

void ModelConfig::validate() const {
    if (layer_dims.size() < 2) fail(Errc::invalid_argument, "model needs at least two layer dimensions");
    for (std::size_t d : layer_dims)
        if (d == 0) fail(Errc::invalid_argument, "layer dimensions must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) fail(Errc::invalid_argument, "beta must be finite and nonnegative");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail(Errc::invalid_argument, "dropout rate must lie in [0, 1)");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay))
        fail(Errc::invalid_argument, "weight decay must be finite and nonnegative");
}

ModelState init_model(const ModelConfig& config, Rng& rng) {
    config.validate();
    ModelState state;
    state.config = config;
    for (std::size_t l = 0; l + 1 < config.layer_dims.size(); ++l)
        state.weights.push_back(glorot_init(rng, config.layer_dims[l], config.layer_dims[l + 1]));
    return state;
}

InputDiffusion diffuse_input(const NormalizedGraph& ng, const Matrix& x) {
    return {spmm(ng.sym_norm, x), smoothness_trace(ng, x)};
}

double anisotropy_factor(double trace, double beta) { return -std::expm1(-beta * trace * trace); }

AnisoDiffusion aniso_diffuse(const NormalizedGraph& ng, const Matrix& h, double beta) {
    AnisoDiffusion out;
    out.trace = smoothness_trace(ng, h);
    out.phi = anisotropy_factor(out.trace, beta);
    out.g = spmm(ng.sym_norm, h);
    scale_inplace(out.g, out.phi);
    return out;
}

double aggregation_weight(const NormalizedGraph& ng, double phi, std::size_t i, std::size_t j) {
    const std::size_t n = ng.num_nodes();
    if (i >= n || j >= n)
        fail(Errc::index_out_of_range, "aggregation_weight: node pair (" + std::to_string(i) + ", " +
                                           std::to_string(j) + ") out of range for " + std::to_string(n) + " nodes");
    return phi * ng.self_looped.at(i, j) / std::sqrt(ng.degree[i] * ng.degree[j]);
}

ForwardResult forward(const ModelState& state, const NormalizedGraph& ng, const InputDiffusion& input, Rng* rng,
                      bool training) {
    const ModelConfig& cfg = state.config;
    const std::size_t n = ng.num_nodes();
    const std::size_t layers = state.weights.size();
    if (layers == 0) fail(Errc::invalid_argument, "forward: model has no weights");
    if (input.diffused.rows() != n || input.diffused.cols() != state.weights[0].rows())
        fail(Errc::shape_mismatch, "forward: features are " + std::to_string(input.diffused.rows()) + "x" +
                                       std::to_string(input.diffused.cols()) + ", model expects " +
                                       std::to_string(n) + "x" + std::to_string(state.weights[0].rows()));
    const bool dropout = training && cfg.dropout_rate > 0.0;
    if (dropout && rng == nullptr) fail(Errc::invalid_argument, "forward: dropout during training needs an Rng");

    ForwardResult result;
    ForwardCache& cache = result.cache;
    cache.layers.resize(layers);
    cache.fingerprint = fingerprint_of(state, n);

    Matrix hidden;
    for (std::size_t l = 0; l < layers; ++l) {
        LayerCache& lc = cache.layers[l];
        const Matrix* operand = nullptr;
        if (l == 0) {
            lc.diffused_layer = true;
            lc.trace = effective_trace(cfg, input.trace, n, input.diffused.cols());
            lc.phi = phi_for(cfg, lc.trace);
            operand = &input.diffused;
        } else {
            lc.input = std::move(hidden);
            if (cfg.diffusion == DiffusionMode::per_layer) {
                lc.diffused_layer = true;
                lc.trace = effective_trace(cfg, smoothness_trace(ng, lc.input), n, lc.input.cols());
                lc.phi = phi_for(cfg, lc.trace);
                lc.diffused = spmm(ng.sym_norm, lc.input);
                operand = &lc.diffused;
            } else {
                operand = &lc.input;
            }
        }
        lc.scale = lc.diffused_layer ? lc.phi : 1.0;
        if (dropout) {
            lc.keep = draw_keep_mask(*operand, cfg.dropout_rate, *rng);
            lc.scale /= 1.0 - cfg.dropout_rate;
        }
        Matrix z = masked_matmul(*operand, lc.keep, lc.scale, state.weights[l]);
        if (l + 1 < layers) {
            hidden = relu(z);
        } else {
            cache.probabilities = softmax_rows(z);
        }
    }
    require_finite(cache.probabilities, "forward output");
    result.probabilities = cache.probabilities;
    return result;
}

ForwardResult forward(const ModelState& state, const NormalizedGraph& ng, const Matrix& x, Rng* rng, bool training) {
    if (x.rows() != ng.num_nodes())
        fail(Errc::shape_mismatch, "forward: feature matrix has " + std::to_string(x.rows()) + " rows, graph has " +
                                       std::to_string(ng.num_nodes()) + " nodes");
    return forward(state, ng, diffuse_input(ng, x), rng, training);
}

double cross_entropy(const Matrix& probabilities, std::span<const int> labels, std::span<const std::size_t> mask) {
    check_labels(labels, mask, probabilities.rows(), probabilities.cols());
    double total = 0.0;
    for (std::size_t i : mask)
        total -= std::log(std::max(probabilities(i, static_cast<std::size_t>(labels[i])), kProbabilityFloor));
    return total;
}

double objective(const ModelState& state, const Matrix& probabilities, std::span<const int> labels,
                 std::span<const std::size_t> mask) {
    double loss = cross_entropy(probabilities, labels, mask);
    if (state.config.loss == LossReduction::mean) loss /= static_cast<double>(mask.size());
    if (state.config.weight_decay > 0.0 && !state.weights.empty())
        loss += 0.5 * state.config.weight_decay * squared_norm(state.weights[0]);
    return loss;
}

std::vector<Matrix> backward(const ModelState& state, const NormalizedGraph& ng, const InputDiffusion& input,
                             const ForwardCache& cache, std::span<const int> labels,
                             std::span<const std::size_t> mask) {
    const ModelConfig& cfg = state.config;
    const std::size_t n = ng.num_nodes();
    const std::size_t layers = state.weights.size();
    if (cache.layers.size() != layers || cache.probabilities.rows() != n ||
        cache.fingerprint != fingerprint_of(state, n))
        fail(Errc::stale_cache, "backward: forward cache does not match the current model state");
    const std::size_t classes = cache.probabilities.cols();
    check_labels(labels, mask, n, classes);

    // d(loss)/dZ at the softmax layer; zero on unmasked rows.
    Matrix dz(n, classes);
    const double unit = cfg.loss == LossReduction::mean ? 1.0 / static_cast<double>(mask.size()) : 1.0;
    for (std::size_t i : mask) {
        auto p = cache.probabilities.row(i);
        auto g = dz.row(i);
        for (std::size_t c = 0; c < classes; ++c) g[c] += unit * p[c];
        g[static_cast<std::size_t>(labels[i])] -= unit;
    }

    std::vector<Matrix> grads(layers);
    for (std::size_t l = layers; l-- > 0;) {
        const LayerCache& lc = cache.layers[l];
        const Matrix& operand = l == 0 ? input.diffused : (lc.diffused_layer ? lc.diffused : lc.input);
        grads[l] = masked_matmul_tn(operand, lc.keep, lc.scale, dz);
        if (l == 0) break;

        // d(loss)/d(operand) = scale · keep ⊙ (dZ Wᵀ)
        Matrix d_operand = matmul_nt(dz, state.weights[l]);
        const double per_keep = lc.keep.empty() ? 1.0 : 1.0 / (1.0 - cfg.dropout_rate);
        if (!lc.keep.empty()) {
            auto v = d_operand.values();
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!lc.keep[i]) v[i] = 0.0;
        }

        Matrix dh;
        if (lc.diffused_layer) {
            // G = φ Â H; the dropout-masked gradient w.r.t. G is d_operand / keep_prob.
            scale_inplace(d_operand, per_keep);
            dh = spmm(ng.sym_norm, d_operand);
            scale_inplace(dh, lc.phi);
            if (cfg.kind == ModelKind::agcn && cfg.phi_gradient && cfg.beta > 0.0) {
                const double d_phi = dot(d_operand, lc.diffused);
                double dphi_dt = 2.0 * cfg.beta * lc.trace * std::exp(-cfg.beta * lc.trace * lc.trace);
                if (cfg.trace_normalize)
                    dphi_dt /= static_cast<double>(n) * static_cast<double>(lc.input.cols());
                if (d_phi != 0.0 && dphi_dt != 0.0)
                    axpy(dh, d_phi * dphi_dt, smoothness_trace_gradient(ng, lc.input));
            }
        } else {
            scale_inplace(d_operand, lc.scale);
            dh = std::move(d_operand);
        }

        // ReLU: H = max(0, Z), so the mask is H > 0.
        auto hv = lc.input.values();
        auto gv = dh.values();
        for (std::size_t i = 0; i < gv.size(); ++i)
            if (hv[i] <= 0.0) gv[i] = 0.0;
        dz = std::move(dh);
    }

    if (cfg.weight_decay > 0.0) axpy(grads[0], cfg.weight_decay, state.weights[0]);
    for (const Matrix& g : grads) require_finite(g, "gradient");
    return grads;
}

std::vector<Matrix> backward(const ModelState& state, const NormalizedGraph& ng, const Matrix& x,
                             const ForwardCache& cache, std::span<const int> labels,
                             std::span<const std::size_t> mask) {
    return backward(state, ng, diffuse_input(ng, x), cache, labels, mask);
}

}  // namespace agcn
