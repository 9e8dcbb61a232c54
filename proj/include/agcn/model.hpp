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
#include <cstdint>
#include <span>
#include <vector>

#include "agcn/graph.hpp"
#include "agcn/linalg.hpp"

namespace agcn {

enum class ModelKind { gcn, agcn };

/// input_once diffuses only the raw features and then applies an MLP;
/// per_layer diffuses the input of every layer.
enum class DiffusionMode { input_once, per_layer };

enum class LossReduction { sum, mean };

struct ModelConfig {
    /// [F, hidden..., C]; one weight matrix per consecutive pair.
    std::vector<std::size_t> layer_dims;
    ModelKind kind = ModelKind::agcn;
    double beta = 1.0;
    DiffusionMode diffusion = DiffusionMode::input_once;
    double dropout_rate = 0.5;
    /// Applied as weight_decay * ½‖W⁽⁰⁾‖².
    double weight_decay = 5e-4;
    /// Divide the smoothness trace by n·F before the anisotropy factor.
    bool trace_normalize = false;
    /// Propagate gradients through the anisotropy factor in per_layer mode.
    bool phi_gradient = true;
    LossReduction loss = LossReduction::sum;

    std::size_t num_layers() const noexcept { return layer_dims.empty() ? 0 : layer_dims.size() - 1; }
    void validate() const;
};

struct ModelState {
    ModelConfig config;
    std::vector<Matrix> weights;
};

/// Glorot-initialized weights for every layer, drawn in layer order.
ModelState init_model(const ModelConfig& config, Rng& rng);

/// Â·X and tr(Xᵀ L X). Both are constant across training, so they are
/// computed once per dataset.
struct InputDiffusion {
    Matrix diffused;
    double trace = 0.0;
};

InputDiffusion diffuse_input(const NormalizedGraph& ng, const Matrix& x);

/// φ = 1 − exp(−β t²).
double anisotropy_factor(double trace, double beta);

struct AnisoDiffusion {
    Matrix g;
    double phi = 0.0;
    double trace = 0.0;
};

/// G = φ · Â · H with φ computed from the smoothness trace of H.
AnisoDiffusion aniso_diffuse(const NormalizedGraph& ng, const Matrix& h, double beta);

/// α_ij = φ · Ã_ij / sqrt(d_i d_j).
double aggregation_weight(const NormalizedGraph& ng, double phi, std::size_t i, std::size_t j);

struct LayerCache {
    bool diffused_layer = false;
    double trace = 0.0;
    double phi = 1.0;
    /// H⁽ˡ⁾ for l ≥ 1; layer 0 reads the shared InputDiffusion instead.
    Matrix input;
    /// Â·H⁽ˡ⁾ for per-layer diffusion at l ≥ 1.
    Matrix diffused;
    /// Dropout keep flags over the layer operand; empty when dropout is off.
    std::vector<std::uint8_t> keep;
    /// Operand multiplier: φ for diffused layers, divided by the keep probability under dropout.
    double scale = 1.0;
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    Matrix probabilities;
    std::uint64_t fingerprint = 0;

    /// Activations after the first layer, H⁽¹⁾; the class probabilities for one-layer models.
    const Matrix& first_layer_output() const noexcept {
        return layers.size() > 1 ? layers[1].input : probabilities;
    }
};

struct ForwardResult {
    Matrix probabilities;
    ForwardCache cache;
};

/// Runs the network. `rng` is required when training with dropout and
/// ignored otherwise.
ForwardResult forward(const ModelState& state, const NormalizedGraph& ng, const InputDiffusion& input, Rng* rng,
                      bool training);
ForwardResult forward(const ModelState& state, const NormalizedGraph& ng, const Matrix& x, Rng* rng, bool training);

/// Σ over masked nodes of −log Ŷ[i, label(i)], probabilities clamped at 1e-12.
double cross_entropy(const Matrix& probabilities, std::span<const int> labels, std::span<const std::size_t> mask);

/// Training objective: the reduced cross-entropy plus first-layer weight decay.
double objective(const ModelState& state, const Matrix& probabilities, std::span<const int> labels,
                 std::span<const std::size_t> mask);

/// Gradients of `objective` with respect to every weight matrix.
std::vector<Matrix> backward(const ModelState& state, const NormalizedGraph& ng, const InputDiffusion& input,
                             const ForwardCache& cache, std::span<const int> labels,
                             std::span<const std::size_t> mask);
std::vector<Matrix> backward(const ModelState& state, const NormalizedGraph& ng, const Matrix& x,
                             const ForwardCache& cache, std::span<const int> labels,
                             std::span<const std::size_t> mask);

}  // namespace agcn
