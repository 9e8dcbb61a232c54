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
#include <string>
#include <vector>

#include <json.hpp>

#include "agcn/augment.hpp"
#include "agcn/dataset.hpp"
#include "agcn/model.hpp"
#include "agcn/trainer.hpp"
#include "report.hpp"

namespace agcn::detail {

enum class Command { train, grid_search, depth_study, augment_eval };

const char* command_name(Command c) noexcept;

// Everything needed to rerun an experiment. It is embedded in every report
// and read back by replay.
struct ExperimentConfig {
    Command command = Command::train;
    std::string dataset_path;
    bool row_normalize = true;
    ModelConfig model;
    std::size_t hidden = 16;
    std::size_t layers = 2;
    TrainConfig train;
    std::vector<std::size_t> depths{2, 3, 4, 5, 6};
    std::vector<AugmentMethod> augment;
    // 0 picks default_additions_per_class per run.
    std::size_t additions_per_class = 0;
    double walk_lambda = 1.0;
};

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
/// Throws Errc::format_error on a malformed or incomplete config.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Fills model.layer_dims from hidden/layers and the dataset shape, then runs.
Report run_experiment(ExperimentConfig cfg, const Dataset& ds);

}  // namespace agcn::detail
