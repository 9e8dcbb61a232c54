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

#include "agcn/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "agcn/error.hpp"
#include "agcn/evalstats.hpp"
#include "parallel.hpp"

namespace agcn {

namespace {

// Rng streams forked from a run's seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kDropoutStream = 2;
constexpr std::uint64_t kSplitStream = 3;

std::string beta_label(double beta) {
    std::ostringstream os;
    os << beta;
    return os.str();
}

MultiRunResult summarize(std::vector<RunReport> runs) {
    MultiRunResult out;
    std::vector<double> test, val;
    for (const auto& r : runs) {
        test.push_back(r.test_accuracy);
        val.push_back(r.val_accuracy);
    }
    out.mean_test_accuracy = mean(test);
    out.std_test_accuracy = sample_std(test);
    out.mean_val_accuracy = mean(val);
    out.runs = std::move(runs);
    return out;
}

}  // namespace

std::vector<double> default_beta_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    return grid;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        fail(Errc::invalid_argument, "learning rate must be positive");
    if (patience < 1) fail(Errc::invalid_argument, "patience must be at least 1");
    if (runs < 1) fail(Errc::invalid_argument, "runs must be at least 1");
    if (beta_grid.empty()) fail(Errc::invalid_argument, "beta grid is empty");
    for (double b : beta_grid)
        if (!(b >= 0.0) || !std::isfinite(b)) fail(Errc::invalid_argument, "beta grid values must be nonnegative");
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
        fail(Errc::invalid_argument, "train fraction must lie in [0, 1]");
}

AdamState make_adam(const std::vector<Matrix>& weights) {
    AdamState adam;
    for (const Matrix& w : weights) {
        adam.m.emplace_back(w.rows(), w.cols());
        adam.v.emplace_back(w.rows(), w.cols());
    }
    return adam;
}

void adam_step(AdamState& adam, std::vector<Matrix>& weights, const std::vector<Matrix>& grads, double lr) {
    if (weights.size() != grads.size() || weights.size() != adam.m.size())
        fail(Errc::shape_mismatch, "adam_step: weight, gradient and moment counts differ");
    ++adam.step;
    const double t = static_cast<double>(adam.step);
    const double correction1 = 1.0 - std::pow(adam.beta1, t);
    const double correction2 = 1.0 - std::pow(adam.beta2, t);
    for (std::size_t l = 0; l < weights.size(); ++l) {
        auto w = weights[l].values();
        auto g = grads[l].values();
        auto m = adam.m[l].values();
        auto v = adam.v[l].values();
        if (g.size() != w.size() || m.size() != w.size())
            fail(Errc::shape_mismatch, "adam_step: shape mismatch at layer " + std::to_string(l));
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
            v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            w[i] -= lr * m_hat / (std::sqrt(v_hat) + adam.epsilon);
        }
    }
}

TrainingContext::TrainingContext(const Dataset& ds)
    : ds_(&ds), ng_(normalize(ds.graph)), input_(diffuse_input(ng_, ds.features)) {}

Splits splits_for_run(const Dataset& ds, const TrainConfig& cfg, std::uint64_t run_seed,
                      std::vector<std::string>* warnings) {
    if (cfg.train_fraction <= 0.0) return ds.splits;
    Rng rng = Rng(run_seed).fork(kSplitStream);
    return subsample_split(ds, cfg.train_fraction, rng, cfg.val_size, cfg.test_size, warnings).splits;
}

TrainResult train(const TrainingContext& ctx, const Splits& splits, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, std::uint64_t seed, const LabelTargets* targets) {
    train_cfg.validate();
    const Dataset& ds = ctx.dataset();
    if (model_cfg.layer_dims.empty() || model_cfg.layer_dims.front() != ds.num_features() ||
        model_cfg.layer_dims.back() != ds.num_classes)
        fail(Errc::shape_mismatch, "model dimensions do not match the dataset's features and classes");
    if (splits.val.empty() || splits.test.empty())
        fail(Errc::empty_mask, "training needs nonempty validation and test splits");

    const std::vector<std::size_t>& train_mask = targets ? targets->mask : splits.train;
    const std::vector<int>& train_labels = targets ? targets->labels : ds.labels;
    if (train_mask.empty()) fail(Errc::empty_mask, "training split is empty");

    Rng init_rng = Rng(seed).fork(kInitStream);
    Rng dropout_rng = Rng(seed).fork(kDropoutStream);

    TrainResult result;
    result.model = init_model(model_cfg, init_rng);
    RunReport& report = result.report;
    report.seed = seed;
    report.beta = model_cfg.beta;
    report.train_size = train_mask.size();

    ModelState& state = result.model;
    AdamState adam = make_adam(state.weights);
    std::vector<Matrix> best_weights = state.weights;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= train_cfg.max_epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        try {
            ForwardResult fwd = forward(state, ctx.graph(), ctx.input(), &dropout_rng, true);
            rec.train_loss = cross_entropy(fwd.probabilities, train_labels, train_mask);
            if (!std::isfinite(rec.train_loss)) fail(Errc::non_finite, "training loss");
            auto grads = backward(state, ctx.graph(), ctx.input(), fwd.cache, train_labels, train_mask);
            adam_step(adam, state.weights, grads, train_cfg.learning_rate);

            ForwardResult eval = forward(state, ctx.graph(), ctx.input(), nullptr, false);
            rec.val_loss = cross_entropy(eval.probabilities, ds.labels, splits.val);
            rec.val_accuracy = accuracy(eval.probabilities, ds.labels, splits.val);
            for (const LayerCache& lc : eval.cache.layers) {
                if (!lc.diffused_layer) continue;
                rec.phi.push_back(lc.phi);
                rec.trace.push_back(lc.trace);
            }
            if (!std::isfinite(rec.val_loss)) fail(Errc::non_finite, "validation loss");
        } catch (const Error& e) {
            if (e.code() != Errc::non_finite) throw;
            fail(Errc::divergence, "training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
        }
        report.history.push_back(rec);
        report.stop_epoch = epoch;

        if (rec.val_loss < best_val) {
            best_val = rec.val_loss;
            best_weights = state.weights;
            report.best_epoch = epoch;
            report.val_accuracy = rec.val_accuracy;
            since_best = 0;
        } else if (++since_best >= train_cfg.patience) {
            break;
        }
    }

    state.weights = std::move(best_weights);
    Matrix probs = predict(ctx, state);
    if (report.best_epoch == 0) {
        best_val = cross_entropy(probs, ds.labels, splits.val);
        report.val_accuracy = accuracy(probs, ds.labels, splits.val);
    }
    report.best_val_loss = best_val;
    report.test_accuracy = accuracy(probs, ds.labels, splits.test);
    return result;
}

TrainResult train(const Dataset& ds, const ModelConfig& model_cfg, const TrainConfig& train_cfg, std::uint64_t seed) {
    TrainingContext ctx(ds);
    std::vector<std::string> warnings;
    Splits splits = splits_for_run(ds, train_cfg, seed, &warnings);
    TrainResult r = train(ctx, splits, model_cfg, train_cfg, seed);
    r.report.warnings = std::move(warnings);
    return r;
}

Matrix predict(const TrainingContext& ctx, const ModelState& state) {
    return forward(state, ctx.graph(), ctx.input(), nullptr, false).probabilities;
}

MultiRunResult train_runs(const TrainingContext& ctx, const ModelConfig& model_cfg, const TrainConfig& train_cfg) {
    train_cfg.validate();
    std::vector<RunReport> runs(train_cfg.runs);
    detail::parallel_for(train_cfg.runs, train_cfg.threads, [&](std::size_t r) {
        const std::uint64_t seed = train_cfg.seed + r;
        std::vector<std::string> warnings;
        Splits splits = splits_for_run(ctx.dataset(), train_cfg, seed, &warnings);
        runs[r] = train(ctx, splits, model_cfg, train_cfg, seed).report;
        runs[r].warnings = std::move(warnings);
    });
    return summarize(std::move(runs));
}

GridSearchResult grid_search_beta(const TrainingContext& ctx, const ModelConfig& model_cfg,
                                  const TrainConfig& train_cfg) {
    train_cfg.validate();
    const std::size_t points = train_cfg.beta_grid.size();
    const std::size_t runs = train_cfg.runs;
    std::vector<RunReport> all(points * runs);
    detail::parallel_for(points * runs, train_cfg.threads, [&](std::size_t job) {
        const double beta = train_cfg.beta_grid[job / runs];
        const std::uint64_t seed = train_cfg.seed + job % runs;
        ModelConfig cfg = model_cfg;
        cfg.beta = beta;
        try {
            std::vector<std::string> warnings;
            Splits splits = splits_for_run(ctx.dataset(), train_cfg, seed, &warnings);
            all[job] = train(ctx, splits, cfg, train_cfg, seed).report;
            all[job].warnings = std::move(warnings);
        } catch (const Error& e) {
            throw Error(e.code(), "beta=" + beta_label(beta) + ": " + e.what());
        }
    });

    GridSearchResult result;
    std::size_t best_index = 0;
    std::vector<MultiRunResult> per_beta;
    for (std::size_t p = 0; p < points; ++p) {
        std::vector<RunReport> slice(all.begin() + static_cast<std::ptrdiff_t>(p * runs),
                                     all.begin() + static_cast<std::ptrdiff_t>((p + 1) * runs));
        std::vector<double> val;
        for (const auto& r : slice) val.push_back(r.val_accuracy);
        MultiRunResult summary = summarize(std::move(slice));
        GridPoint gp;
        gp.beta = train_cfg.beta_grid[p];
        gp.mean_val_accuracy = summary.mean_val_accuracy;
        gp.std_val_accuracy = sample_std(val);
        gp.mean_test_accuracy = summary.mean_test_accuracy;
        gp.std_test_accuracy = summary.std_test_accuracy;
        result.curve.push_back(gp);
        per_beta.push_back(std::move(summary));
        const GridPoint& best = result.curve[best_index];
        if (gp.mean_val_accuracy > best.mean_val_accuracy ||
            (gp.mean_val_accuracy == best.mean_val_accuracy && gp.beta < best.beta))
            best_index = p;
    }
    result.best_beta = result.curve[best_index].beta;
    result.best = std::move(per_beta[best_index]);
    return result;
}

std::vector<std::size_t> layer_dims_for(const Dataset& ds, std::size_t hidden, std::size_t layers) {
    if (layers < 1) fail(Errc::invalid_argument, "a model needs at least one layer");
    if (hidden < 1) fail(Errc::invalid_argument, "hidden width must be positive");
    std::vector<std::size_t> dims{ds.num_features()};
    for (std::size_t l = 1; l < layers; ++l) dims.push_back(hidden);
    dims.push_back(ds.num_classes);
    return dims;
}

std::vector<DepthRow> depth_study(const TrainingContext& ctx, const ModelConfig& model_cfg,
                                  const TrainConfig& train_cfg, const std::vector<std::size_t>& depths) {
    train_cfg.validate();
    const std::size_t hidden = model_cfg.layer_dims.size() > 2 ? model_cfg.layer_dims[1] : 16;
    std::vector<DepthRow> rows;
    for (std::size_t depth : depths) {
        if (depth < 2) fail(Errc::invalid_argument, "depth study needs depths of at least 2");
        for (ModelKind kind : {ModelKind::agcn, ModelKind::gcn}) {
            ModelConfig cfg = model_cfg;
            cfg.kind = kind;
            cfg.diffusion = DiffusionMode::per_layer;
            cfg.layer_dims = layer_dims_for(ctx.dataset(), hidden, depth);
            MultiRunResult res = train_runs(ctx, cfg, train_cfg);
            DepthRow row;
            row.depth = depth;
            row.model = kind == ModelKind::agcn ? "agcn" : "gcn";
            for (const auto& r : res.runs) row.accuracies.push_back(r.test_accuracy);
            row.mean = res.mean_test_accuracy;
            row.std = res.std_test_accuracy;
            row.runs = std::move(res.runs);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace agcn
