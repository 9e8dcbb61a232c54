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

#include "experiment.hpp"

#include <sstream>

#include "agcn/error.hpp"

namespace agcn::detail {

namespace {

using ojson = nlohmann::ordered_json;

const char* kind_name(ModelKind k) { return k == ModelKind::agcn ? "agcn" : "gcn"; }
const char* diffusion_name(DiffusionMode d) { return d == DiffusionMode::input_once ? "input-once" : "per-layer"; }
const char* loss_name(LossReduction l) { return l == LossReduction::sum ? "sum" : "mean"; }

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& s, const std::pair<const char*, Enum> (&table)[N], const char* what) {
    for (const auto& [name, value] : table)
        if (s == name) return value;
    fail(Errc::format_error, std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::pair<const char*, Command> kCommands[] = {{"train", Command::train},
                                                         {"grid-search", Command::grid_search},
                                                         {"depth-study", Command::depth_study},
                                                         {"augment-eval", Command::augment_eval}};
constexpr std::pair<const char*, ModelKind> kKinds[] = {{"gcn", ModelKind::gcn}, {"agcn", ModelKind::agcn}};
constexpr std::pair<const char*, DiffusionMode> kDiffusions[] = {{"input-once", DiffusionMode::input_once},
                                                                 {"per-layer", DiffusionMode::per_layer}};
constexpr std::pair<const char*, LossReduction> kLosses[] = {{"sum", LossReduction::sum},
                                                             {"mean", LossReduction::mean}};
constexpr std::pair<const char*, AugmentMethod> kMethods[] = {{"co", AugmentMethod::co_training},
                                                              {"self", AugmentMethod::self_training},
                                                              {"union", AugmentMethod::union_set},
                                                              {"intersection", AugmentMethod::intersection}};

std::string run_key(std::size_t r) { return "run" + std::to_string(r); }

void add_runs(Report& report, const std::vector<RunReport>& runs,
              const std::vector<std::pair<std::string, std::string>>& tags, const std::string& key_prefix) {
    for (std::size_t r = 0; r < runs.size(); ++r)
        report.rows.push_back(ReportRow{tags, runs[r], key_prefix + run_key(r)});
}

void summarize(Report& report, const MultiRunResult& res) {
    report.summary["mean"] = res.mean_test_accuracy;
    report.summary["std"] = res.std_test_accuracy;
    report.summary["mean_val_accuracy"] = res.mean_val_accuracy;
}

Report augment_report(const ExperimentConfig& cfg, const TrainingContext& ctx) {
    const std::vector<AugmentMethod> methods =
        cfg.augment.empty() ? std::vector<AugmentMethod>{AugmentMethod::co_training, AugmentMethod::self_training,
                                                         AugmentMethod::union_set, AugmentMethod::intersection}
                            : cfg.augment;
    const auto rows = augment_eval(ctx, cfg.model, cfg.train, methods, cfg.additions_per_class, cfg.walk_lambda);
    Report report;
    ojson table = ojson::array(), means = ojson::object(), stds = ojson::object();
    std::ostringstream csv;
    csv << "method,mean,std,gain,runs\n";
    for (const AugmentRow& row : rows) {
        add_runs(report, row.runs, {{"method", row.method}}, row.method + ".");
        const double gain = row.mean - rows.front().mean;
        table.push_back({{"method", row.method}, {"mean", row.mean}, {"std", row.std}, {"gain", gain},
                         {"accuracies", row.accuracies}});
        means[row.method] = row.mean;
        stds[row.method] = row.std;
        csv << row.method << ',' << format_number(row.mean) << ',' << format_number(row.std) << ','
            << format_number(gain) << ',' << row.accuracies.size() << '\n';
    }
    report.summary["table"] = std::move(table);
    report.summary["mean"] = std::move(means);
    report.summary["std"] = std::move(stds);
    report.extra_files.emplace_back("table.csv", csv.str());
    return report;
}

}  // namespace

const char* command_name(Command c) noexcept {
    for (const auto& [name, value] : kCommands)
        if (value == c) return name;
    return "unknown";
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    ojson j;
    j["command"] = command_name(cfg.command);
    j["dataset"] = cfg.dataset_path;
    j["row_normalize"] = cfg.row_normalize;
    const ModelConfig& m = cfg.model;
    j["model"] = {{"kind", kind_name(m.kind)},
                  {"diffusion", diffusion_name(m.diffusion)},
                  {"beta", m.beta},
                  {"hidden", cfg.hidden},
                  {"layers", cfg.layers},
                  {"layer_dims", m.layer_dims},
                  {"dropout", m.dropout_rate},
                  {"weight_decay", m.weight_decay},
                  {"trace_normalize", m.trace_normalize},
                  {"phi_gradient", m.phi_gradient},
                  {"loss", loss_name(m.loss)}};
    const TrainConfig& t = cfg.train;
    j["train"] = {{"learning_rate", t.learning_rate},
                  {"max_epochs", t.max_epochs},
                  {"patience", t.patience},
                  {"runs", t.runs},
                  {"seed", t.seed},
                  {"seeds", ojson::array()},
                  {"beta_grid", t.beta_grid},
                  {"train_fraction", t.train_fraction},
                  {"val_size", t.val_size},
                  {"test_size", t.test_size},
                  {"threads", t.threads}};
    for (std::size_t r = 0; r < t.runs; ++r) j["train"]["seeds"].push_back(t.seed + r);
    j["depths"] = cfg.depths;
    ojson methods = ojson::array();
    for (AugmentMethod a : cfg.augment) methods.push_back(augment_method_name(a));
    j["augment"] = {{"methods", methods},
                    {"additions_per_class", cfg.additions_per_class},
                    {"walk_lambda", cfg.walk_lambda}};
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig cfg;
        cfg.command = parse_enum(j.at("command").get<std::string>(), kCommands, "command");
        cfg.dataset_path = j.at("dataset").get<std::string>();
        cfg.row_normalize = j.at("row_normalize").get<bool>();
        const auto& m = j.at("model");
        cfg.model.kind = parse_enum(m.at("kind").get<std::string>(), kKinds, "model");
        cfg.model.diffusion = parse_enum(m.at("diffusion").get<std::string>(), kDiffusions, "diffusion");
        cfg.model.beta = m.at("beta").get<double>();
        cfg.hidden = m.at("hidden").get<std::size_t>();
        cfg.layers = m.at("layers").get<std::size_t>();
        cfg.model.dropout_rate = m.at("dropout").get<double>();
        cfg.model.weight_decay = m.at("weight_decay").get<double>();
        cfg.model.trace_normalize = m.at("trace_normalize").get<bool>();
        cfg.model.phi_gradient = m.at("phi_gradient").get<bool>();
        cfg.model.loss = parse_enum(m.at("loss").get<std::string>(), kLosses, "loss");
        const auto& t = j.at("train");
        cfg.train.learning_rate = t.at("learning_rate").get<double>();
        cfg.train.max_epochs = t.at("max_epochs").get<std::size_t>();
        cfg.train.patience = t.at("patience").get<std::size_t>();
        cfg.train.runs = t.at("runs").get<std::size_t>();
        cfg.train.seed = t.at("seed").get<std::uint64_t>();
        cfg.train.beta_grid = t.at("beta_grid").get<std::vector<double>>();
        cfg.train.train_fraction = t.at("train_fraction").get<double>();
        cfg.train.val_size = t.at("val_size").get<std::size_t>();
        cfg.train.test_size = t.at("test_size").get<std::size_t>();
        cfg.train.threads = t.at("threads").get<std::size_t>();
        cfg.depths = j.at("depths").get<std::vector<std::size_t>>();
        const auto& a = j.at("augment");
        for (const auto& name : a.at("methods")) cfg.augment.push_back(parse_enum(name.get<std::string>(), kMethods, "augmentation"));
        cfg.additions_per_class = a.at("additions_per_class").get<std::size_t>();
        cfg.walk_lambda = a.at("walk_lambda").get<double>();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::format_error, std::string("malformed experiment config: ") + e.what());
    }
}

Report run_experiment(ExperimentConfig cfg, const Dataset& ds) {
    if (cfg.layers < 1) fail(Errc::invalid_argument, "layers must be at least 1");
    cfg.model.layer_dims = layer_dims_for(ds, cfg.hidden, cfg.layers);
    cfg.model.validate();
    cfg.train.validate();
    const TrainingContext ctx(ds);

    Report report;
    switch (cfg.command) {
    case Command::train:
        if (!cfg.augment.empty()) {
            report = augment_report(cfg, ctx);
        } else {
            const MultiRunResult res = train_runs(ctx, cfg.model, cfg.train);
            add_runs(report, res.runs, {}, "");
            summarize(report, res);
        }
        break;
    case Command::grid_search: {
        const GridSearchResult res = grid_search_beta(ctx, cfg.model, cfg.train);
        add_runs(report, res.best.runs, {}, "");
        ojson curve = ojson::array();
        std::ostringstream csv;
        csv << "beta,mean_val_accuracy,std_val_accuracy,mean_test_accuracy,std_test_accuracy\n";
        for (const GridPoint& p : res.curve) {
            curve.push_back({{"beta", p.beta},
                             {"mean_val_accuracy", p.mean_val_accuracy},
                             {"std_val_accuracy", p.std_val_accuracy},
                             {"mean_test_accuracy", p.mean_test_accuracy},
                             {"std_test_accuracy", p.std_test_accuracy}});
            csv << format_number(p.beta) << ',' << format_number(p.mean_val_accuracy) << ','
                << format_number(p.std_val_accuracy) << ',' << format_number(p.mean_test_accuracy) << ','
                << format_number(p.std_test_accuracy) << '\n';
        }
        report.summary["best_beta"] = res.best_beta;
        summarize(report, res.best);
        report.summary["beta_curve"] = std::move(curve);
        report.extra_files.emplace_back("beta_curve.csv", csv.str());
        break;
    }
    case Command::depth_study: {
        const auto rows = depth_study(ctx, cfg.model, cfg.train, cfg.depths);
        ojson table = ojson::array(), means = ojson::object(), stds = ojson::object();
        std::ostringstream csv;
        csv << "model,depth,mean,std,runs\n";
        for (const DepthRow& row : rows) {
            const std::string group = row.model + ".L" + std::to_string(row.depth);
            add_runs(report, row.runs, {{"model", row.model}, {"depth", std::to_string(row.depth)}}, group + ".");
            table.push_back({{"model", row.model}, {"depth", row.depth}, {"mean", row.mean}, {"std", row.std},
                             {"accuracies", row.accuracies}});
            means[group] = row.mean;
            stds[group] = row.std;
            csv << row.model << ',' << row.depth << ',' << format_number(row.mean) << ',' << format_number(row.std)
                << ',' << row.accuracies.size() << '\n';
        }
        report.summary["table"] = std::move(table);
        report.summary["mean"] = std::move(means);
        report.summary["std"] = std::move(stds);
        report.extra_files.emplace_back("table.csv", csv.str());
        break;
    }
    case Command::augment_eval: report = augment_report(cfg, ctx); break;
    }
    report.config = config_to_json(cfg);
    return report;
}

}  // namespace agcn::detail
