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
#include <filesystem>
#include <string>
#include <vector>

#include "agcn/graph.hpp"
#include "agcn/linalg.hpp"

namespace agcn {

struct Splits {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

struct Dataset {
    std::string name;
    Graph graph;
    Matrix features;
    /// One entry per node; -1 marks an unknown label.
    std::vector<int> labels;
    std::size_t num_classes = 0;
    Splits splits;

    std::size_t num_nodes() const noexcept { return graph.num_nodes(); }
    std::size_t num_features() const noexcept { return features.cols(); }

    /// Throws Errc::invariant_violation describing the first broken invariant.
    void validate() const;
};

/// Reads a dataset directory:
///   meta.json     {"name", "num_nodes", "num_features", "num_classes"}
///   edges.tsv     src<TAB>dst<TAB>weight, src < dst, lexicographically sorted
///   features.bin  little-endian float32, row-major, num_nodes*num_features values
///   labels.tsv    node<TAB>class, sorted by node
///   splits.json   {"train": [...], "val": [...], "test": [...]}, each ascending
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes the same layout. Each file is written to a temporary name and
/// renamed into place. Features are narrowed to float32.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Shortest decimal that round-trips, with a trailing ".0" on integral values.
std::string format_weight(double w);

/// Divides each nonzero row by its 1-norm.
Matrix row_normalize(const Matrix& x);

/// |train| / n.
double label_rate(const Dataset& ds);

/// Stratified resampling of the three splits from the labeled nodes. Every
/// class present gets at least one training node when train_count allows;
/// shortfalls are clamped and reported through `warnings`.
Dataset resample_split(const Dataset& ds, std::size_t train_count, std::size_t val_count, std::size_t test_count,
                       Rng& rng, std::vector<std::string>* warnings = nullptr);

/// resample_split with round(fraction * n) training nodes.
Dataset subsample_split(const Dataset& ds, double train_fraction, Rng& rng, std::size_t val_count = 500,
                        std::size_t test_count = 1000, std::vector<std::string>* warnings = nullptr);

}  // namespace agcn
