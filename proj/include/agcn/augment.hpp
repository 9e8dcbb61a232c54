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
#include <string>
#include <vector>

#include "agcn/graph.hpp"
#include "agcn/linalg.hpp"
#include "agcn/trainer.hpp"

namespace agcn {

enum class ConfidenceSource { random_walk, model };

struct ConfidenceTable {
    Matrix scores;
    ConfidenceSource source = ConfidenceSource::random_walk;
};

enum class AugmentMethod { co_training, self_training, union_set, intersection };

const char* augment_method_name(AugmentMethod m) noexcept;

struct AugmentPlan {
    AugmentMethod method = AugmentMethod::co_training;
    std::size_t additions_per_class = 1;
    /// Absorption strength of the random walk.
    double walk_lambda = 1.0;
};

/// A training set after expansion. `labels` has one entry per node: the
/// true label for original training nodes, the pseudo-label for added
/// nodes and -1 elsewhere.
struct ExpandedLabels {
    std::vector<std::size_t> base;
    std::vector<std::size_t> mask;
    std::vector<int> labels;
    std::vector<std::string> warnings;

    LabelTargets targets() const { return {mask, labels}; }
};

/// Solves (λI + L) P = λ Y column by column with conjugate gradients, where
/// Y is the one-hot indicator of the labeled training nodes.
ConfidenceTable parw_confidence(const NormalizedGraph& ng, std::span<const int> labels,
                                std::span<const std::size_t> train_mask, std::size_t num_classes, double lambda);

/// Adds, per class, the most confident nodes outside the training set (and
/// outside `exclude`). Ties go to the smaller node index; a node picked by
/// several classes keeps its most confident one, ties to the smaller class.
ExpandedLabels expand_labels(const ConfidenceTable& conf, std::span<const int> labels,
                             std::span<const std::size_t> train_mask, std::size_t additions_per_class,
                             std::span<const std::size_t> exclude = {});

/// Union keeps every node of either set, resolving label conflicts in
/// favour of `a`; intersection keeps the base plus the additions both sets
/// agree on.
ExpandedLabels combine(const ExpandedLabels& a, const ExpandedLabels& b, AugmentMethod mode);

/// Additions per class that roughly triples a training set of `train_size`.
std::size_t default_additions_per_class(std::size_t train_size, std::size_t num_classes);

struct AugmentRow {
    std::string method;
    std::vector<double> accuracies;
    double mean = 0.0;
    double std = 0.0;
    std::vector<RunReport> runs;
};

/// Per seed: trains the plain model, then each requested augmentation, on
/// the same resampled split. The first row is the plain baseline.
std::vector<AugmentRow> augment_eval(const TrainingContext& ctx, const ModelConfig& model_cfg,
                                     const TrainConfig& train_cfg, const std::vector<AugmentMethod>& methods,
                                     std::size_t additions_per_class, double walk_lambda);

}  // namespace agcn
