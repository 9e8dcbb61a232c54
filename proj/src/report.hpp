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

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agcn/trainer.hpp"

namespace agcn::detail {

// Shortest round-trip decimal; CSV cells and history rows use it so that
// reports can be diffed byte-for-byte.
std::string format_number(double v);

struct ReportRow {
    // Leading columns that identify the group, e.g. {"model", "agcn"}.
    std::vector<std::pair<std::string, std::string>> tags;
    RunReport run;
    // File key; the history lands in "<prefix>.<key>.history.csv".
    std::string key;
};

class Report {
public:
    nlohmann::ordered_json config;
    std::vector<ReportRow> rows;
    // Summary fields appended after per_run (mean, std, beta_curve, ...).
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    // Extra CSV files as (suffix, contents), written to "<prefix>.<suffix>".
    std::vector<std::pair<std::string, std::string>> extra_files;
    // Replaces the per-run CSV when set (ANOVA has no runs).
    std::string csv_override;

    std::string json(const std::string& stem) const;
    std::string csv(const std::string& stem) const;
    /// Every file of the report as (path, contents).
    std::vector<std::pair<std::string, std::string>> files(const std::string& prefix) const;
    void write(const std::string& prefix) const;
};

std::string history_csv(const RunReport& run);

}  // namespace agcn::detail
