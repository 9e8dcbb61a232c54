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

#include "agcn/agcn.h"

#include <cmath>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "agcn/dataset.hpp"
#include "agcn/error.hpp"
#include "agcn/evalstats.hpp"
#include "agcn/graph.hpp"
#include "agcn/trainer.hpp"
#include "atomic_file.hpp"
#include "experiment.hpp"
#include "report.hpp"

struct agcn_dataset {
    agcn::Dataset ds;
    // Directory the dataset was loaded from; empty for in-memory datasets.
    std::string source;
    bool row_normalized = false;
};

struct agcn_report {
    agcn::detail::Report report;
    std::string stem = "report";
    std::string json;
    std::string csv;
};

namespace {

thread_local std::string last_error;

agcn_status status_of(agcn::Errc code) {
    switch (agcn::category_of(code)) {
    case agcn::ErrorCategory::usage: return AGCN_E_USAGE;
    case agcn::ErrorCategory::data: return AGCN_E_DATA;
    case agcn::ErrorCategory::numerical: return AGCN_E_NUMERICAL;
    }
    return AGCN_E_INTERNAL;
}

template <class Fn>
agcn_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        last_error.clear();
        return AGCN_OK;
    } catch (const agcn::Error& e) {
        last_error = std::string(agcn::errc_name(e.code())) + ": " + e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return AGCN_E_INTERNAL;
}

void require(bool ok, const char* what) {
    if (!ok) agcn::fail(agcn::Errc::invalid_argument, what);
}

agcn::detail::ExperimentConfig to_config(const agcn_dataset& h, const agcn_options& o) {
    using namespace agcn;
    detail::ExperimentConfig cfg;
    switch (o.command) {
    case AGCN_CMD_TRAIN: cfg.command = detail::Command::train; break;
    case AGCN_CMD_GRID_SEARCH: cfg.command = detail::Command::grid_search; break;
    case AGCN_CMD_DEPTH_STUDY: cfg.command = detail::Command::depth_study; break;
    case AGCN_CMD_AUGMENT_EVAL: cfg.command = detail::Command::augment_eval; break;
    default: fail(Errc::invalid_argument, "unknown command");
    }
    cfg.dataset_path = h.source;
    cfg.row_normalize = h.row_normalized;
    require(o.model == AGCN_MODEL_GCN || o.model == AGCN_MODEL_AGCN, "unknown model kind");
    cfg.model.kind = o.model == AGCN_MODEL_GCN ? ModelKind::gcn : ModelKind::agcn;
    switch (o.diffusion) {
    case AGCN_DIFFUSION_DEFAULT:
        cfg.model.diffusion = cfg.model.kind == ModelKind::gcn ? DiffusionMode::per_layer : DiffusionMode::input_once;
        break;
    case AGCN_DIFFUSION_INPUT_ONCE: cfg.model.diffusion = DiffusionMode::input_once; break;
    case AGCN_DIFFUSION_PER_LAYER: cfg.model.diffusion = DiffusionMode::per_layer; break;
    default: fail(Errc::invalid_argument, "unknown diffusion mode");
    }
    cfg.model.beta = o.beta;
    cfg.hidden = o.hidden;
    cfg.layers = o.layers;
    cfg.model.dropout_rate = o.dropout;
    cfg.model.weight_decay = o.weight_decay;
    cfg.model.trace_normalize = o.trace_normalize != 0;
    cfg.model.loss = o.mean_loss ? LossReduction::mean : LossReduction::sum;
    cfg.train.learning_rate = o.learning_rate;
    cfg.train.max_epochs = o.epochs;
    cfg.train.patience = o.patience;
    cfg.train.runs = o.runs;
    cfg.train.seed = o.seed;
    if (o.beta_grid) {
        require(o.beta_grid_len > 0, "beta grid is empty");
        cfg.train.beta_grid.assign(o.beta_grid, o.beta_grid + o.beta_grid_len);
    }
    cfg.train.train_fraction = o.train_fraction;
    cfg.train.val_size = o.val_size;
    cfg.train.test_size = o.test_size;
    cfg.train.threads = o.threads;
    if (o.depths) {
        require(o.depths_len > 0, "depth list is empty");
        cfg.depths.assign(o.depths, o.depths + o.depths_len);
    }
    require((o.augment & ~0xFu) == 0, "unknown augmentation flag");
    const std::pair<unsigned, AugmentMethod> flags[] = {{AGCN_AUGMENT_CO, AugmentMethod::co_training},
                                                        {AGCN_AUGMENT_SELF, AugmentMethod::self_training},
                                                        {AGCN_AUGMENT_UNION, AugmentMethod::union_set},
                                                        {AGCN_AUGMENT_INTERSECTION, AugmentMethod::intersection}};
    for (const auto& [bit, method] : flags)
        if (o.augment & bit) cfg.augment.push_back(method);
    cfg.additions_per_class = o.additions_per_class;
    require(std::isfinite(o.walk_lambda) && o.walk_lambda > 0.0, "walk lambda must be positive");
    cfg.walk_lambda = o.walk_lambda;
    return cfg;
}

}  // namespace

extern "C" {

const char* agcn_last_error(void) { return last_error.c_str(); }

const char* agcn_version(void) { return "1.0.0"; }

void agcn_options_init(agcn_options* o) {
    if (!o) return;
    *o = agcn_options{};
    o->command = AGCN_CMD_TRAIN;
    o->model = AGCN_MODEL_AGCN;
    o->diffusion = AGCN_DIFFUSION_DEFAULT;
    o->beta = 1.0;
    o->hidden = 16;
    o->layers = 2;
    o->dropout = 0.5;
    o->weight_decay = 5e-4;
    o->learning_rate = 0.01;
    o->epochs = 200;
    o->patience = 10;
    o->runs = 10;
    o->seed = 42;
    o->val_size = 500;
    o->test_size = 1000;
    o->threads = 1;
    o->walk_lambda = 1.0;
}

agcn_status agcn_dataset_load(const char* dir, agcn_dataset** out) {
    return guarded([&] {
        require(dir && out, "null argument");
        auto h = std::make_unique<agcn_dataset>();
        h->ds = agcn::load_dataset(dir);
        h->source = dir;
        *out = h.release();
    });
}

agcn_status agcn_dataset_save(const agcn_dataset* ds, const char* dir) {
    return guarded([&] {
        require(ds && dir, "null argument");
        agcn::save_dataset(ds->ds, dir);
    });
}

void agcn_dataset_free(agcn_dataset* ds) { delete ds; }

agcn_status agcn_dataset_info_get(const agcn_dataset* ds, agcn_dataset_info* info) {
    return guarded([&] {
        require(ds && info, "null argument");
        const agcn::Dataset& d = ds->ds;
        *info = agcn_dataset_info{d.num_nodes(),       d.graph.num_edges(),   d.num_features(),
                                  d.num_classes,       d.splits.train.size(), d.splits.val.size(),
                                  d.splits.test.size(), agcn::label_rate(d)};
    });
}

agcn_status agcn_dataset_row_normalize(agcn_dataset* ds) {
    return guarded([&] {
        require(ds != nullptr, "null argument");
        ds->ds.features = agcn::row_normalize(ds->ds.features);
        ds->row_normalized = true;
    });
}

agcn_status agcn_dataset_from_features(const float* features, size_t n, size_t f, size_t k, const int32_t* labels,
                                       size_t num_classes, const char* name, agcn_dataset** out) {
    return guarded([&] {
        require(features && out, "null argument");
        require(n > 0 && f > 0, "feature matrix must be nonempty");
        auto h = std::make_unique<agcn_dataset>();
        agcn::Dataset& d = h->ds;
        d.name = name ? name : "knn";
        d.features = agcn::Matrix(n, f);
        for (size_t i = 0; i < n * f; ++i) d.features.values()[i] = features[i];
        d.graph = agcn::knn_graph(d.features, k);
        d.labels.assign(n, -1);
        if (labels) {
            for (size_t i = 0; i < n; ++i) {
                if (labels[i] < -1 || (labels[i] >= 0 && static_cast<size_t>(labels[i]) >= num_classes))
                    agcn::fail(agcn::Errc::label_out_of_range, "label of node " + std::to_string(i) + " out of range");
                d.labels[i] = labels[i];
            }
        }
        d.num_classes = num_classes;
        d.validate();
        *out = h.release();
    });
}

agcn_status agcn_dataset_resample(agcn_dataset* ds, double train_fraction, size_t val_size, size_t test_size,
                                  uint64_t seed) {
    return guarded([&] {
        require(ds != nullptr, "null argument");
        agcn::Rng rng(seed);
        ds->ds = agcn::subsample_split(ds->ds, train_fraction, rng, val_size, test_size);
    });
}

agcn_status agcn_run(const agcn_dataset* ds, const agcn_options* opts, agcn_report** out) {
    return guarded([&] {
        require(ds && opts && out, "null argument");
        auto h = std::make_unique<agcn_report>();
        h->report = agcn::detail::run_experiment(to_config(*ds, *opts), ds->ds);
        *out = h.release();
    });
}

agcn_status agcn_replay(const char* report_json, agcn_report** out) {
    return guarded([&] {
        require(report_json && out, "null argument");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(report_json);
        } catch (const nlohmann::json::exception& e) {
            agcn::fail(agcn::Errc::format_error, std::string("report is not valid JSON: ") + e.what());
        }
        const nlohmann::json& cfg_json = doc.contains("config") ? doc["config"] : doc;
        const agcn::detail::ExperimentConfig cfg = agcn::detail::config_from_json(cfg_json);
        if (cfg.dataset_path.empty())
            agcn::fail(agcn::Errc::invalid_argument, "report does not name a dataset directory");
        agcn::Dataset ds = agcn::load_dataset(cfg.dataset_path);
        if (cfg.row_normalize) ds.features = agcn::row_normalize(ds.features);
        auto h = std::make_unique<agcn_report>();
        h->report = agcn::detail::run_experiment(cfg, ds);
        *out = h.release();
    });
}

agcn_status agcn_anova(const double* const* values, const size_t* sizes, const char* const* names, size_t count,
                       agcn_report** out) {
    return guarded([&] {
        require(values && sizes && out, "null argument");
        std::vector<agcn::AccuracySample> groups(count);
        for (size_t g = 0; g < count; ++g) {
            require(values[g] != nullptr || sizes[g] == 0, "null group");
            groups[g].method = names && names[g] ? names[g] : "group" + std::to_string(g);
            groups[g].accuracies.assign(values[g], values[g] + sizes[g]);
        }
        const agcn::AnovaResult res = agcn::one_way_anova(groups);

        auto h = std::make_unique<agcn_report>();
        auto& rep = h->report;
        rep.config = {{"command", "anova"}};
        nlohmann::ordered_json table = nlohmann::ordered_json::array();
        std::ostringstream csv;
        csv << "method,n,mean,std,f,p\n";
        for (const auto& g : groups) {
            const double m = agcn::mean(g.accuracies), s = agcn::sample_std(g.accuracies);
            rep.config["inputs"].push_back(g.method);
            table.push_back({{"method", g.method}, {"n", g.accuracies.size()}, {"mean", m}, {"std", s},
                             {"accuracies", g.accuracies}});
            csv << g.method << ',' << g.accuracies.size() << ',' << agcn::detail::format_number(m) << ','
                << agcn::detail::format_number(s) << ',' << agcn::detail::format_number(res.f) << ','
                << agcn::detail::format_number(res.p) << '\n';
        }
        rep.summary["groups"] = std::move(table);
        rep.summary["f"] = res.f;
        rep.summary["p"] = res.p;
        rep.summary["df_between"] = res.df_between;
        rep.summary["df_within"] = res.df_within;
        rep.summary["ss_between"] = res.ss_between;
        rep.summary["ss_within"] = res.ss_within;
        rep.csv_override = csv.str();
        *out = h.release();
    });
}

agcn_status agcn_export_embeddings(const agcn_dataset* ds, const agcn_options* opts, const char* path) {
    return guarded([&] {
        require(ds && opts && path, "null argument");
        agcn::detail::ExperimentConfig cfg = to_config(*ds, *opts);
        cfg.model.layer_dims = agcn::layer_dims_for(ds->ds, cfg.hidden, cfg.layers);
        const agcn::TrainingContext ctx(ds->ds);
        const agcn::Splits splits = agcn::splits_for_run(ds->ds, cfg.train, cfg.train.seed);
        const agcn::TrainResult res = agcn::train(ctx, splits, cfg.model, cfg.train, cfg.train.seed);
        const agcn::ForwardResult fwd = agcn::forward(res.model, ctx.graph(), ctx.input(), nullptr, false);
        const agcn::Matrix& h = fwd.cache.first_layer_output();
        std::ostringstream csv;
        csv << "node";
        for (size_t j = 0; j < h.cols(); ++j) csv << ",d" << j;
        csv << '\n';
        for (size_t i = 0; i < h.rows(); ++i) {
            csv << i;
            for (size_t j = 0; j < h.cols(); ++j) csv << ',' << agcn::detail::format_number(h(i, j));
            csv << '\n';
        }
        agcn::detail::write_file_atomic(path, csv.str());
    });
}

agcn_status agcn_report_json(agcn_report* report, const char** json) {
    return guarded([&] {
        require(report && json, "null argument");
        report->json = report->report.json(report->stem);
        *json = report->json.c_str();
    });
}

agcn_status agcn_report_csv(agcn_report* report, const char** csv) {
    return guarded([&] {
        require(report && csv, "null argument");
        report->csv = report->report.csv(report->stem);
        *csv = report->csv.c_str();
    });
}

agcn_status agcn_report_write(agcn_report* report, const char* prefix) {
    return guarded([&] {
        require(report && prefix && *prefix, "null argument");
        report->report.write(prefix);
        report->stem = std::filesystem::path(prefix).filename().string();
    });
}

void agcn_report_free(agcn_report* report) { delete report; }

}  // extern "C"
