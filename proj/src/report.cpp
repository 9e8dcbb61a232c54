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

#include "report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "atomic_file.hpp"

namespace agcn::detail {

namespace {

constexpr const char* kRunColumns[] = {"seed",        "beta",       "train_size",    "test_accuracy", "val_accuracy",
                                       "stop_epoch", "best_epoch", "best_val_loss", "history_file"};

std::string history_name(const std::string& stem, const std::string& key) {
    return stem + "." + key + ".history.csv";
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string history_csv(const RunReport& run) {
    std::ostringstream out;
    const std::size_t layers = run.history.empty() ? 0 : run.history.front().phi.size();
    out << "epoch,train_loss,val_loss,val_accuracy";
    for (std::size_t l = 0; l < layers; ++l) out << ",phi_" << l;
    for (std::size_t l = 0; l < layers; ++l) out << ",trace_" << l;
    out << '\n';
    for (const EpochRecord& e : run.history) {
        out << e.epoch << ',' << format_number(e.train_loss) << ',' << format_number(e.val_loss) << ','
            << format_number(e.val_accuracy);
        for (double p : e.phi) out << ',' << format_number(p);
        for (double t : e.trace) out << ',' << format_number(t);
        out << '\n';
    }
    return out.str();
}

std::string Report::json(const std::string& stem) const {
    nlohmann::ordered_json doc;
    doc["config"] = config;
    nlohmann::ordered_json per_run = nlohmann::ordered_json::array();
    for (const ReportRow& row : rows) {
        nlohmann::ordered_json r;
        for (const auto& [k, v] : row.tags) r[k] = v;
        r["seed"] = row.run.seed;
        r["beta"] = row.run.beta;
        r["train_size"] = row.run.train_size;
        r["test_accuracy"] = row.run.test_accuracy;
        r["val_accuracy"] = row.run.val_accuracy;
        r["stop_epoch"] = row.run.stop_epoch;
        r["best_epoch"] = row.run.best_epoch;
        r["best_val_loss"] = row.run.best_val_loss;
        r["history_file"] = history_name(stem, row.key);
        r["warnings"] = row.run.warnings;
        per_run.push_back(std::move(r));
    }
    doc["per_run"] = std::move(per_run);
    for (const auto& [k, v] : summary.items()) doc[k] = v;
    return doc.dump(2) + "\n";
}

std::string Report::csv(const std::string& stem) const {
    if (!csv_override.empty()) return csv_override;
    std::ostringstream out;
    bool first = true;
    if (!rows.empty())
        for (const auto& tag : rows.front().tags) {
            out << (first ? "" : ",") << csv_cell(tag.first);
            first = false;
        }
    for (const char* c : kRunColumns) {
        out << (first ? "" : ",") << c;
        first = false;
    }
    out << '\n';
    for (const ReportRow& row : rows) {
        for (const auto& tag : row.tags) out << csv_cell(tag.second) << ',';
        const RunReport& r = row.run;
        out << r.seed << ',' << format_number(r.beta) << ',' << r.train_size << ',' << format_number(r.test_accuracy)
            << ',' << format_number(r.val_accuracy) << ',' << r.stop_epoch << ',' << r.best_epoch << ','
            << format_number(r.best_val_loss) << ',' << csv_cell(history_name(stem, row.key)) << '\n';
    }
    return out.str();
}

std::vector<std::pair<std::string, std::string>> Report::files(const std::string& prefix) const {
    const std::string stem = std::filesystem::path(prefix).filename().string();
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back(prefix + ".json", json(stem));
    out.emplace_back(prefix + ".csv", csv(stem));
    for (const ReportRow& row : rows) out.emplace_back(prefix + "." + row.key + ".history.csv", history_csv(row.run));
    for (const auto& [suffix, body] : extra_files) out.emplace_back(prefix + "." + suffix, body);
    return out;
}

void Report::write(const std::string& prefix) const {
    for (const auto& [path, body] : files(prefix)) write_file_atomic(path, body);
}

}  // namespace agcn::detail
