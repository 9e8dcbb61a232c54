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

// Command-line front end. Links only against the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "agcn/agcn.h"

namespace {

struct Failure {
    int code;
    std::string message;
};

void check(agcn_status st) {
    if (st != AGCN_OK) throw Failure{static_cast<int>(st), agcn_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{AGCN_E_USAGE, msg}; }

// Reads a file into memory; unreadable input is a data error.
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{AGCN_E_DATA, "cannot open " + path};
    return {std::istreambuf_iterator<char>(in), {}};
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    usage_error("invalid number '" + s + "' in " + what);
}

// "0:0.1:5" or "0,0.4,1". Range points are rounded to 12 significant digits
// so 0.1 steps land on the same doubles as the literals.
std::vector<double> parse_beta_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) usage_error("--beta-grid range must look like start:step:stop");
        const double a = parse_double(parts[0], "--beta-grid"), step = parse_double(parts[1], "--beta-grid"),
                     b = parse_double(parts[2], "--beta-grid");
        if (!(step > 0.0) || b < a) usage_error("--beta-grid needs a positive step and start <= stop");
        const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", a + static_cast<double>(i) * step);
            grid.push_back(std::strtod(buf, nullptr));
        }
    } else {
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ',');) grid.push_back(parse_double(p, "--beta-grid"));
    }
    if (grid.empty()) usage_error("--beta-grid is empty");
    return grid;
}

struct ExperimentFlags {
    std::string dataset;
    std::string out = "report";
    std::string model = "agcn";
    std::string diffusion = "default";
    std::string beta_grid;
    std::string row_normalize = "on";
    std::string trace_normalize = "off";
    std::string loss = "sum";
    std::vector<std::string> augment;
    std::vector<std::size_t> depths;
    agcn_options opts{};
    std::vector<double> grid;
};

const std::map<std::string, int> kOnOff{{"on", 1}, {"off", 0}};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f, bool with_out = true) {
    agcn_options_init(&f.opts);
    cmd->add_option("--dataset", f.dataset, "Dataset directory")->required();
    if (with_out) cmd->add_option("--out", f.out, "Report path prefix")->capture_default_str();
    cmd->add_option("--model", f.model)->check(CLI::IsMember({"gcn", "agcn"}))->capture_default_str();
    cmd->add_option("--diffusion", f.diffusion, "input-once or per-layer (default depends on the model)")
        ->check(CLI::IsMember({"default", "input-once", "per-layer"}));
    cmd->add_option("--beta", f.opts.beta)->capture_default_str();
    cmd->add_option("--beta-grid", f.beta_grid, "start:step:stop or a comma list (default 0:0.1:5)");
    cmd->add_option("--hidden", f.opts.hidden)->capture_default_str();
    cmd->add_option("--layers", f.opts.layers)->capture_default_str();
    cmd->add_option("--dropout", f.opts.dropout)->capture_default_str();
    cmd->add_option("--weight-decay", f.opts.weight_decay)->capture_default_str();
    cmd->add_option("--lr", f.opts.learning_rate)->capture_default_str();
    cmd->add_option("--epochs", f.opts.epochs)->capture_default_str();
    cmd->add_option("--patience", f.opts.patience)->capture_default_str();
    cmd->add_option("--runs", f.opts.runs)->capture_default_str();
    cmd->add_option("--seed", f.opts.seed)->capture_default_str();
    cmd->add_option("--train-fraction", f.opts.train_fraction, "Resample splits per run when > 0")
        ->capture_default_str();
    cmd->add_option("--val-size", f.opts.val_size)->capture_default_str();
    cmd->add_option("--test-size", f.opts.test_size)->capture_default_str();
    cmd->add_option("--augment", f.augment)->delimiter(',')->check(
        CLI::IsMember({"co", "self", "union", "intersection"}));
    cmd->add_option("--additions-per-class", f.opts.additions_per_class, "0 picks about twice the train size / C");
    cmd->add_option("--walk-lambda", f.opts.walk_lambda)->capture_default_str();
    cmd->add_option("--row-normalize", f.row_normalize)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    cmd->add_option("--trace-normalize", f.trace_normalize)->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd->add_option("--loss", f.loss)->check(CLI::IsMember({"sum", "mean"}))->capture_default_str();
    cmd->add_option("--threads", f.opts.threads)->capture_default_str();
}

// Moves the string flags into the option struct.
void resolve(ExperimentFlags& f, agcn_command command) {
    agcn_options& o = f.opts;
    o.command = command;
    o.model = f.model == "gcn" ? AGCN_MODEL_GCN : AGCN_MODEL_AGCN;
    o.diffusion = f.diffusion == "input-once"  ? AGCN_DIFFUSION_INPUT_ONCE
                  : f.diffusion == "per-layer" ? AGCN_DIFFUSION_PER_LAYER
                                               : AGCN_DIFFUSION_DEFAULT;
    if (!f.beta_grid.empty()) {
        f.grid = parse_beta_grid(f.beta_grid);
        o.beta_grid = f.grid.data();
        o.beta_grid_len = f.grid.size();
    }
    o.trace_normalize = kOnOff.at(f.trace_normalize);
    o.mean_loss = f.loss == "mean";
    for (const std::string& a : f.augment)
        o.augment |= a == "co" ? AGCN_AUGMENT_CO : a == "self" ? AGCN_AUGMENT_SELF
                                             : a == "union"    ? AGCN_AUGMENT_UNION
                                                               : AGCN_AUGMENT_INTERSECTION;
    if (!f.depths.empty()) {
        o.depths = f.depths.data();
        o.depths_len = f.depths.size();
    }
}

class Dataset {
public:
    explicit Dataset(const ExperimentFlags& f) {
        check(agcn_dataset_load(f.dataset.c_str(), &ds_));
        if (kOnOff.at(f.row_normalize)) check(agcn_dataset_row_normalize(ds_));
    }
    Dataset(const Dataset&) = delete;
    Dataset& operator=(const Dataset&) = delete;
    ~Dataset() { agcn_dataset_free(ds_); }
    agcn_dataset* get() const { return ds_; }

private:
    agcn_dataset* ds_ = nullptr;
};

class Report {
public:
    Report() = default;
    Report(const Report&) = delete;
    Report& operator=(const Report&) = delete;
    ~Report() { agcn_report_free(r_); }
    agcn_report** out() { return &r_; }
    agcn_report* get() const { return r_; }

private:
    agcn_report* r_ = nullptr;
};

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

// Writes the report and prints a short summary of it.
void finish(Report& report, const std::string& prefix) {
    check(agcn_report_write(report.get(), prefix.c_str()));
    const char* text = nullptr;
    check(agcn_report_json(report.get(), &text));
    const auto doc = nlohmann::json::parse(text);
    for (const auto& run : doc["per_run"])
        for (const auto& w : run["warnings"]) std::cerr << "warning: seed " << run["seed"] << ": " << w.get<std::string>() << '\n';
    if (doc.contains("best_beta")) {
        for (const auto& p : doc["beta_curve"])
            std::cout << "beta " << fixed(p["beta"].get<double>(), 2) << "  val " << fixed(p["mean_val_accuracy"])
                      << "  test " << fixed(p["mean_test_accuracy"]) << '\n';
        std::cout << "best beta " << doc["best_beta"].get<double>() << '\n';
    }
    if (doc.contains("table")) {
        for (const auto& row : doc["table"]) {
            std::cout << (row.contains("model") ? row["model"].get<std::string>() + " L" + row["depth"].dump()
                                                : row["method"].get<std::string>())
                      << "  " << fixed(row["mean"].get<double>()) << " +- " << fixed(row["std"].get<double>()) << '\n';
        }
    } else if (doc.contains("mean")) {
        std::cout << "test accuracy " << fixed(doc["mean"].get<double>()) << " +- " << fixed(doc["std"].get<double>())
                  << " over " << doc["per_run"].size() << " runs\n";
    }
    std::cout << "report written to " << prefix << ".json\n";
}

std::vector<double> read_accuracies(const std::string& path) {
    std::stringstream in(slurp(path));
    std::string line;
    std::vector<double> values;
    long column = 0;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        if (first) {
            first = false;
            char* end = nullptr;
            std::strtod(cells[0].c_str(), &end);
            if (end == cells[0].c_str() || *end != '\0') {
                // Header row: prefer a test_accuracy column, else the first one.
                for (std::size_t i = 0; i < cells.size(); ++i)
                    if (cells[i] == "test_accuracy") column = static_cast<long>(i);
                continue;
            }
        }
        if (static_cast<std::size_t>(column) >= cells.size())
            throw Failure{AGCN_E_DATA, path + ":" + std::to_string(line_no) + ": missing accuracy column"};
        char* end = nullptr;
        const double v = std::strtod(cells[static_cast<std::size_t>(column)].c_str(), &end);
        if (*end != '\0' || end == cells[static_cast<std::size_t>(column)].c_str())
            throw Failure{AGCN_E_DATA, path + ":" + std::to_string(line_no) + ": not a number"};
        values.push_back(v);
    }
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic graph convolutional networks for semi-supervised node classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(agcn_version()));

    ExperimentFlags train_f, grid_f, depth_f, augment_f, embed_f;
    auto* train_cmd = app.add_subcommand("train", "Train a model over several seeds");
    add_experiment_flags(train_cmd, train_f);
    auto* grid_cmd = app.add_subcommand("grid-search", "Select beta by mean validation accuracy");
    add_experiment_flags(grid_cmd, grid_f);
    auto* depth_cmd = app.add_subcommand("depth-study", "Per-layer AGCN and GCN accuracy versus depth");
    add_experiment_flags(depth_cmd, depth_f);
    depth_cmd->add_option("--depths", depth_f.depths, "Depths to train (default 2,3,4,5,6)")->delimiter(',');
    auto* augment_cmd = app.add_subcommand("augment-eval", "Compare training-set expansion strategies");
    add_experiment_flags(augment_cmd, augment_f);
    auto* embed_cmd = app.add_subcommand("export-embeddings", "Write first-layer activations as CSV");
    add_experiment_flags(embed_cmd, embed_f, false);
    std::string embed_out = "embeddings.csv";
    embed_cmd->add_option("--out", embed_out, "CSV path")->capture_default_str();

    std::string replay_report, replay_out = "replay";
    auto* replay_cmd = app.add_subcommand("replay", "Rerun the experiment embedded in a report");
    replay_cmd->add_option("--report", replay_report, "Report JSON")->required();
    replay_cmd->add_option("--out", replay_out, "Report path prefix")->capture_default_str();

    std::string knn_features, knn_out, knn_labels, knn_name = "knn";
    std::size_t knn_n = 0, knn_f = 0, knn_k = 8, knn_classes = 0, knn_val = 500, knn_test = 1000;
    double knn_fraction = 0.0;
    std::uint64_t knn_seed = 42;
    auto* knn_cmd = app.add_subcommand("knn-build", "Build a dataset directory from raw features and a k-NN graph");
    knn_cmd->add_option("--features", knn_features, "Row-major little-endian float32 file")->required();
    knn_cmd->add_option("--n", knn_n, "Number of nodes")->required();
    knn_cmd->add_option("--f", knn_f, "Features per node")->required();
    knn_cmd->add_option("--k", knn_k)->capture_default_str();
    knn_cmd->add_option("--out", knn_out, "Output directory")->required();
    knn_cmd->add_option("--labels", knn_labels, "Text file with one integer label per node (-1 unknown)");
    knn_cmd->add_option("--num-classes", knn_classes, "Defaults to max label + 1");
    knn_cmd->add_option("--name", knn_name)->capture_default_str();
    knn_cmd->add_option("--train-fraction", knn_fraction, "Sample stratified splits when > 0");
    knn_cmd->add_option("--val-size", knn_val)->capture_default_str();
    knn_cmd->add_option("--test-size", knn_test)->capture_default_str();
    knn_cmd->add_option("--seed", knn_seed)->capture_default_str();

    std::vector<std::string> anova_inputs;
    std::string anova_out = "anova";
    auto* anova_cmd = app.add_subcommand("anova", "One-way ANOVA over per-run accuracy files");
    anova_cmd->add_option("--inputs", anova_inputs, "CSV files, one group each")->required()->expected(2, -1);
    anova_cmd->add_option("--out", anova_out, "Report path prefix")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (e.get_exit_code() != 0) std::cerr << app.help();
        return AGCN_E_USAGE;
    }

    try {
        const std::pair<CLI::App*, std::pair<ExperimentFlags*, agcn_command>> experiments[] = {
            {train_cmd, {&train_f, AGCN_CMD_TRAIN}},
            {grid_cmd, {&grid_f, AGCN_CMD_GRID_SEARCH}},
            {depth_cmd, {&depth_f, AGCN_CMD_DEPTH_STUDY}},
            {augment_cmd, {&augment_f, AGCN_CMD_AUGMENT_EVAL}}};
        for (const auto& [cmd, target] : experiments) {
            if (!cmd->parsed()) continue;
            ExperimentFlags& f = *target.first;
            resolve(f, target.second);
            Dataset ds(f);
            Report report;
            check(agcn_run(ds.get(), &f.opts, report.out()));
            finish(report, f.out);
            return 0;
        }
        if (embed_cmd->parsed()) {
            resolve(embed_f, AGCN_CMD_TRAIN);
            Dataset ds(embed_f);
            check(agcn_export_embeddings(ds.get(), &embed_f.opts, embed_out.c_str()));
            std::cout << "embeddings written to " << embed_out << '\n';
            return 0;
        }
        if (replay_cmd->parsed()) {
            Report report;
            check(agcn_replay(slurp(replay_report).c_str(), report.out()));
            finish(report, replay_out);
            return 0;
        }
        if (knn_cmd->parsed()) {
            const std::string raw = slurp(knn_features);
            if (knn_n == 0 || knn_f == 0) usage_error("--n and --f must be positive");
            if (raw.size() != knn_n * knn_f * sizeof(float))
                throw Failure{AGCN_E_DATA, knn_features + ": expected " + std::to_string(knn_n * knn_f * 4) +
                                               " bytes, found " + std::to_string(raw.size())};
            std::vector<float> x(knn_n * knn_f);
            for (std::size_t i = 0; i < x.size(); ++i) {
                std::uint32_t bits = 0;
                for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(raw[4 * i + b]);
                std::memcpy(&x[i], &bits, sizeof bits);
            }
            std::vector<std::int32_t> labels;
            if (!knn_labels.empty()) {
                std::stringstream in(slurp(knn_labels));
                for (long v; in >> v;) labels.push_back(static_cast<std::int32_t>(v));
                if (!in.eof()) throw Failure{AGCN_E_DATA, knn_labels + ": not an integer list"};
                if (labels.size() != knn_n)
                    throw Failure{AGCN_E_DATA, knn_labels + ": expected " + std::to_string(knn_n) + " labels, found " +
                                                   std::to_string(labels.size())};
                if (knn_classes == 0)
                    for (std::int32_t v : labels) knn_classes = std::max<std::size_t>(knn_classes, v + 1);
                for (std::int32_t v : labels)
                    if (v < -1 || (v >= 0 && static_cast<std::size_t>(v) >= knn_classes))
                        throw Failure{AGCN_E_DATA, knn_labels + ": label " + std::to_string(v) + " out of range"};
            }
            agcn_dataset* ds = nullptr;
            check(agcn_dataset_from_features(x.data(), knn_n, knn_f, knn_k, labels.empty() ? nullptr : labels.data(),
                                             knn_classes, knn_name.c_str(), &ds));
            const std::unique_ptr<agcn_dataset, void (*)(agcn_dataset*)> guard(ds, agcn_dataset_free);
            if (knn_fraction > 0.0) check(agcn_dataset_resample(ds, knn_fraction, knn_val, knn_test, knn_seed));
            check(agcn_dataset_save(ds, knn_out.c_str()));
            agcn_dataset_info info{};
            check(agcn_dataset_info_get(ds, &info));
            std::cout << "wrote " << knn_out << ": " << info.num_nodes << " nodes, " << info.num_edges << " edges\n";
            return 0;
        }
        if (anova_cmd->parsed()) {
            std::vector<std::vector<double>> groups;
            std::vector<std::string> names;
            for (const std::string& path : anova_inputs) {
                groups.push_back(read_accuracies(path));
                names.push_back(std::filesystem::path(path).stem().string());
            }
            std::vector<const double*> ptrs;
            std::vector<std::size_t> sizes;
            std::vector<const char*> cnames;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                ptrs.push_back(groups[g].data());
                sizes.push_back(groups[g].size());
                cnames.push_back(names[g].c_str());
            }
            Report report;
            check(agcn_anova(ptrs.data(), sizes.data(), cnames.data(), groups.size(), report.out()));
            check(agcn_report_write(report.get(), anova_out.c_str()));
            const char* text = nullptr;
            check(agcn_report_json(report.get(), &text));
            const auto doc = nlohmann::json::parse(text);
            std::cout << "F = " << doc["f"].get<double>() << "\np = " << doc["p"].get<double>() << '\n';
            return 0;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        if (f.code == AGCN_E_USAGE) std::cerr << "run with --help for usage\n";
        return f.code;
    }
    return 0;
}
