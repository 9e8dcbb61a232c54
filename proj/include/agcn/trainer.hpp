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
#include <string>
#include <vector>

#include "agcn/dataset.hpp"
#include "agcn/graph.hpp"
#include "agcn/model.hpp"

namespace agcn {

/// 0.0, 0.1, ..., 5.0 (51 points).
std::vector<double> default_beta_grid();

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t max_epochs = 200;
    /// Stop after this many epochs without a new strict validation-loss minimum.
    std::size_t patience = 10;
    std::size_t runs = 10;
    std::uint64_t seed = 42;
    std::vector<double> beta_grid = default_beta_grid();
    /// 0 keeps the dataset's splits and varies only initialization; a
    /// positive value resamples stratified splits for every run.
    double train_fraction = 0.0;
    std::size_t val_size = 500;
    std::size_t test_size = 1000;
    /// Worker threads for independent runs. Results do not depend on it.
    std::size_t threads = 1;

    void validate() const;
};

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState make_adam(const std::vector<Matrix>& weights);

/// One bias-corrected Adam update of every weight matrix.
void adam_step(AdamState& adam, std::vector<Matrix>& weights, const std::vector<Matrix>& grads, double lr);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    /// Per-layer anisotropy factor and smoothness trace of the evaluation pass.
    std::vector<double> phi;
    std::vector<double> trace;
};

struct RunReport {
    std::uint64_t seed = 0;
    double beta = 0.0;
    std::size_t train_size = 0;
    std::vector<EpochRecord> history;
    std::size_t stop_epoch = 0;
    /// 0 when no epoch ran and the initial weights were kept.
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<std::string> warnings;
};

/// Quantities derived from a dataset once and shared by every run.
class TrainingContext {
public:
    explicit TrainingContext(const Dataset& ds);

    const Dataset& dataset() const noexcept { return *ds_; }
    const NormalizedGraph& graph() const noexcept { return ng_; }
    const InputDiffusion& input() const noexcept { return input_; }

private:
    const Dataset* ds_;
    NormalizedGraph ng_;
    InputDiffusion input_;
};

/// Training mask and labels overriding the dataset's, e.g. after augmentation.
struct LabelTargets {
    std::vector<std::size_t> mask;
    std::vector<int> labels;
};

struct TrainResult {
    ModelState model;
    RunReport report;
};

/// Splits used by the run with the given seed.
Splits splits_for_run(const Dataset& ds, const TrainConfig& cfg, std::uint64_t run_seed,
                      std::vector<std::string>* warnings = nullptr);

/// Full-batch training with early stopping. Returns the weights of the epoch
/// with the lowest validation loss.
TrainResult train(const TrainingContext& ctx, const Splits& splits, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, std::uint64_t seed, const LabelTargets* targets = nullptr);
TrainResult train(const Dataset& ds, const ModelConfig& model_cfg, const TrainConfig& train_cfg, std::uint64_t seed);

/// Class probabilities without dropout.
Matrix predict(const TrainingContext& ctx, const ModelState& state);

struct MultiRunResult {
    std::vector<RunReport> runs;
    double mean_test_accuracy = 0.0;
    double std_test_accuracy = 0.0;
    double mean_val_accuracy = 0.0;
};

/// `runs` independent trainings with seeds seed, seed + 1, ...
MultiRunResult train_runs(const TrainingContext& ctx, const ModelConfig& model_cfg, const TrainConfig& train_cfg);

struct GridPoint {
    double beta = 0.0;
    double mean_val_accuracy = 0.0;
    double std_val_accuracy = 0.0;
    double mean_test_accuracy = 0.0;
    double std_test_accuracy = 0.0;
};

struct GridSearchResult {
    double best_beta = 0.0;
    std::vector<GridPoint> curve;
    /// Runs at the selected beta.
    MultiRunResult best;
};

/// Picks the beta with the highest mean validation accuracy; ties go to the
/// smaller beta.
GridSearchResult grid_search_beta(const TrainingContext& ctx, const ModelConfig& model_cfg,
                                  const TrainConfig& train_cfg);

struct DepthRow {
    std::size_t depth = 0;
    std::string model;
    std::vector<double> accuracies;
    double mean = 0.0;
    double std = 0.0;
    std::vector<RunReport> runs;
};

/// Trains per-layer AGCN and GCN at each depth with layer_dims
/// [F, hidden x (depth - 1), C], hidden taken from model_cfg.
std::vector<DepthRow> depth_study(const TrainingContext& ctx, const ModelConfig& model_cfg,
                                  const TrainConfig& train_cfg, const std::vector<std::size_t>& depths);

/// [F, hidden x (layers - 1), C] for the dataset behind ctx.
std::vector<std::size_t> layer_dims_for(const Dataset& ds, std::size_t hidden, std::size_t layers);

}  // namespace agcn
