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

#include "agcn/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "agcn/error.hpp"
#include "atomic_file.hpp"

namespace agcn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, path.string() + ": cannot open (missing file?)");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

[[noreturn]] void bad_line(const fs::path& file, std::size_t line, const std::string& what) {
    fail(Errc::format_error, file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view field, const fs::path& file, std::size_t line, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        bad_line(file, line, std::string("cannot parse ") + what + " '" + std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return fields;
}

// Visits each newline-terminated line with its 1-based number. A missing final
// newline is tolerated; empty lines are not.
template <typename Fn>
void for_each_line(const std::string& text, const fs::path& file, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string_view line(text.data() + start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) bad_line(file, line_no, "empty line");
        fn(line, line_no);
        start = end + 1;
    }
}

std::size_t json_count(const json& meta, const char* key, const fs::path& file) {
    if (!meta.contains(key) || !meta[key].is_number_integer() || meta[key].get<std::int64_t>() < 0)
        fail(Errc::format_error, file.filename().string() + ": '" + key + "' must be a nonnegative integer");
    return meta[key].get<std::size_t>();
}

std::vector<std::size_t> json_index_list(const json& doc, const char* key, const fs::path& file) {
    if (!doc.contains(key) || !doc[key].is_array())
        fail(Errc::format_error, file.filename().string() + ": '" + key + "' must be an array");
    std::vector<std::size_t> out;
    for (const json& v : doc[key]) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            fail(Errc::format_error, file.filename().string() + ": '" + key + "' holds a non-index value");
        out.push_back(v.get<std::size_t>());
    }
    if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end())
        fail(Errc::invariant_violation, file.filename().string() + ": '" + key + "' must be strictly ascending");
    return out;
}

float load_le_float(const unsigned char* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

void store_le_float(float v, char* p) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) p[b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
}

std::string index_list_json(const std::vector<std::size_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

void check_split(const Dataset& ds, const std::vector<std::size_t>& split, const char* name,
                 std::vector<char>& seen) {
    for (std::size_t i : split) {
        if (i >= ds.num_nodes())
            fail(Errc::invariant_violation, std::string(name) + " split index " + std::to_string(i) + " out of range");
        if (seen[i])
            fail(Errc::invariant_violation, std::string(name) + " split node " + std::to_string(i) +
                                                " also appears in another split");
        seen[i] = 1;
        if (ds.labels[i] < 0)
            fail(Errc::invariant_violation, std::string(name) + " split node " + std::to_string(i) + " has no label");
    }
}

}  // namespace

void Dataset::validate() const {
    const std::size_t n = num_nodes();
    if (n == 0) fail(Errc::invariant_violation, "dataset has no nodes");
    if (features.rows() != n)
        fail(Errc::invariant_violation, "feature matrix has " + std::to_string(features.rows()) + " rows for " +
                                            std::to_string(n) + " nodes");
    if (!all_finite(features)) fail(Errc::invariant_violation, "features contain non-finite values");
    if (labels.size() != n) fail(Errc::invariant_violation, "label vector length differs from node count");
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] < -1 || (labels[i] >= 0 && static_cast<std::size_t>(labels[i]) >= num_classes))
            fail(Errc::invariant_violation, "node " + std::to_string(i) + " has label " + std::to_string(labels[i]) +
                                                " outside [0, " + std::to_string(num_classes) + ")");
    std::vector<char> seen(n, 0);
    check_split(*this, splits.train, "train", seen);
    check_split(*this, splits.val, "val", seen);
    check_split(*this, splits.test, "test", seen);
}

std::string format_weight(double w) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), w);
    std::string s(buf, ptr);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

Dataset load_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) fail(Errc::io_error, dir.string() + ": not a dataset directory");

    Dataset ds;
    const fs::path meta_path = dir / "meta.json";
    json meta;
    try {
        meta = json::parse(read_file(meta_path));
    } catch (const json::exception& e) {
        fail(Errc::format_error, "meta.json: " + std::string(e.what()));
    }
    if (!meta.is_object() || !meta.contains("name") || !meta["name"].is_string())
        fail(Errc::format_error, "meta.json: 'name' must be a string");
    ds.name = meta["name"].get<std::string>();
    const std::size_t n = json_count(meta, "num_nodes", meta_path);
    const std::size_t f = json_count(meta, "num_features", meta_path);
    ds.num_classes = json_count(meta, "num_classes", meta_path);
    if (n == 0) fail(Errc::invariant_violation, "meta.json: num_nodes must be positive");

    const fs::path edges_path = dir / "edges.tsv";
    std::vector<Edge> edges;
    {
        const std::string text = read_file(edges_path);
        for_each_line(text, edges_path, [&](std::string_view line, std::size_t no) {
            auto fields = split_tabs(line);
            if (fields.size() != 3) bad_line(edges_path, no, "expected src<TAB>dst<TAB>weight");
            Edge e{parse_number<std::size_t>(fields[0], edges_path, no, "source"),
                   parse_number<std::size_t>(fields[1], edges_path, no, "target"),
                   parse_number<double>(fields[2], edges_path, no, "weight")};
            if (e.src >= n || e.dst >= n) bad_line(edges_path, no, "node index out of range");
            if (e.src == e.dst) bad_line(edges_path, no, "self-loop");
            if (e.src > e.dst) bad_line(edges_path, no, "src must be smaller than dst");
            if (!std::isfinite(e.weight) || e.weight <= 0.0) bad_line(edges_path, no, "weight must be positive");
            if (!edges.empty()) {
                const Edge& prev = edges.back();
                if (std::tie(prev.src, prev.dst) >= std::tie(e.src, e.dst))
                    bad_line(edges_path, no, "edges not strictly sorted (duplicate or out of order)");
            }
            edges.push_back(e);
        });
    }
    ds.graph = build_graph(n, edges);

    const fs::path features_path = dir / "features.bin";
    {
        const std::string bytes = read_file(features_path);
        const std::size_t expected = n * f * 4;
        if (bytes.size() != expected)
            fail(Errc::format_error, "features.bin: expected " + std::to_string(expected) + " bytes (" +
                                         std::to_string(n) + "x" + std::to_string(f) + " float32), found " +
                                         std::to_string(bytes.size()));
        ds.features = Matrix(n, f);
        auto v = ds.features.values();
        const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = static_cast<double>(load_le_float(raw + 4 * i));
            if (!std::isfinite(v[i]))
                fail(Errc::invariant_violation, "features.bin: non-finite value at byte offset " + std::to_string(4 * i));
        }
    }

    const fs::path labels_path = dir / "labels.tsv";
    ds.labels.assign(n, -1);
    {
        const std::string text = read_file(labels_path);
        std::size_t last = 0;
        bool any = false;
        for_each_line(text, labels_path, [&](std::string_view line, std::size_t no) {
            auto fields = split_tabs(line);
            if (fields.size() != 2) bad_line(labels_path, no, "expected node<TAB>class");
            const auto node = parse_number<std::size_t>(fields[0], labels_path, no, "node");
            const auto cls = parse_number<int>(fields[1], labels_path, no, "class");
            if (node >= n) bad_line(labels_path, no, "node index out of range");
            if (cls < 0 || static_cast<std::size_t>(cls) >= ds.num_classes)
                bad_line(labels_path, no, "class outside [0, num_classes)");
            if (any && node <= last) bad_line(labels_path, no, "nodes not strictly sorted");
            ds.labels[node] = cls;
            last = node;
            any = true;
        });
    }

    const fs::path splits_path = dir / "splits.json";
    json splits;
    try {
        splits = json::parse(read_file(splits_path));
    } catch (const json::exception& e) {
        fail(Errc::format_error, "splits.json: " + std::string(e.what()));
    }
    if (!splits.is_object()) fail(Errc::format_error, "splits.json: expected an object");
    ds.splits.train = json_index_list(splits, "train", splits_path);
    ds.splits.val = json_index_list(splits, "val", splits_path);
    ds.splits.test = json_index_list(splits, "test", splits_path);

    try {
        ds.validate();
    } catch (const Error& e) {
        fail(Errc::invariant_violation, dir.string() + ": " + e.what());
    }
    return ds;
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
    ds.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());

    const std::string meta = "{\"name\": " + json(ds.name).dump(-1, ' ', true) +
                             ", \"num_nodes\": " + std::to_string(ds.num_nodes()) +
                             ", \"num_features\": " + std::to_string(ds.num_features()) +
                             ", \"num_classes\": " + std::to_string(ds.num_classes) + "}\n";
    detail::write_file_atomic(dir / "meta.json", meta);

    std::string edges;
    for (const Edge& e : ds.graph.edges())
        edges += std::to_string(e.src) + '\t' + std::to_string(e.dst) + '\t' + format_weight(e.weight) + '\n';
    detail::write_file_atomic(dir / "edges.tsv", edges);

    std::string features(ds.features.size() * 4, '\0');
    auto v = ds.features.values();
    for (std::size_t i = 0; i < v.size(); ++i) store_le_float(static_cast<float>(v[i]), features.data() + 4 * i);
    detail::write_file_atomic(dir / "features.bin", features);

    std::string labels;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        if (ds.labels[i] >= 0) labels += std::to_string(i) + '\t' + std::to_string(ds.labels[i]) + '\n';
    detail::write_file_atomic(dir / "labels.tsv", labels);

    const std::string splits = "{\"train\": " + index_list_json(ds.splits.train) +
                               ", \"val\": " + index_list_json(ds.splits.val) +
                               ", \"test\": " + index_list_json(ds.splits.test) + "}\n";
    detail::write_file_atomic(dir / "splits.json", splits);
}

Matrix row_normalize(const Matrix& x) {
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        double norm = 0.0;
        for (double v : row) norm += std::abs(v);
        if (norm == 0.0) continue;
        for (double& v : row) v /= norm;
    }
    return out;
}

double label_rate(const Dataset& ds) {
    return static_cast<double>(ds.splits.train.size()) / static_cast<double>(ds.num_nodes());
}

Dataset resample_split(const Dataset& ds, std::size_t train_count, std::size_t val_count, std::size_t test_count,
                       Rng& rng, std::vector<std::string>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };
    const std::size_t classes = ds.num_classes;
    std::vector<std::vector<std::size_t>> by_class(classes);
    std::size_t labeled = 0;
    for (std::size_t i = 0; i < ds.num_nodes(); ++i)
        if (ds.labels[i] >= 0) {
            by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
            ++labeled;
        }
    if (labeled == 0) fail(Errc::invalid_argument, "resample_split: dataset has no labeled nodes");
    for (auto& members : by_class) rng.shuffle(members);

    if (train_count > labeled) {
        warn("requested " + std::to_string(train_count) + " training nodes but only " + std::to_string(labeled) +
             " are labeled");
        train_count = labeled;
    }
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < classes; ++c)
        if (!by_class[c].empty()) present.push_back(c);

    std::vector<std::size_t> quota(classes, 0);
    if (train_count < present.size()) {
        warn("training size " + std::to_string(train_count) + " cannot cover all " + std::to_string(present.size()) +
             " classes; some classes have no training node");
        rng.shuffle(present);
        for (std::size_t m = 0; m < train_count; ++m) quota[present[m]] = 1;
    } else {
        std::vector<double> target(classes, 0.0);
        std::size_t assigned = 0;
        for (std::size_t c : present) {
            target[c] = static_cast<double>(train_count) * static_cast<double>(by_class[c].size()) /
                        static_cast<double>(labeled);
            quota[c] = std::min(by_class[c].size(), std::max<std::size_t>(1, static_cast<std::size_t>(target[c])));
            assigned += quota[c];
        }
        while (assigned < train_count) {
            std::size_t best = classes;
            for (std::size_t c : present)
                if (quota[c] < by_class[c].size() &&
                    (best == classes || target[c] - static_cast<double>(quota[c]) >
                                            target[best] - static_cast<double>(quota[best])))
                    best = c;
            ++quota[best];
            ++assigned;
        }
        while (assigned > train_count) {
            std::size_t best = classes;
            for (std::size_t c : present)
                if (quota[c] > 1 && (best == classes || static_cast<double>(quota[c]) - target[c] >
                                                            static_cast<double>(quota[best]) - target[best]))
                    best = c;
            --quota[best];
            --assigned;
        }
    }

    Dataset out = ds;
    out.splits = Splits{};
    std::vector<std::size_t> rest;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t m = 0; m < by_class[c].size(); ++m)
            (m < quota[c] ? out.splits.train : rest).push_back(by_class[c][m]);
    }
    std::sort(rest.begin(), rest.end());
    rng.shuffle(rest);
    if (val_count + test_count > rest.size()) {
        warn("only " + std::to_string(rest.size()) + " labeled nodes remain for " + std::to_string(val_count) +
             " validation and " + std::to_string(test_count) + " test nodes");
        val_count = std::min(val_count, rest.size());
        test_count = std::min(test_count, rest.size() - val_count);
    }
    out.splits.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(val_count));
    out.splits.test.assign(rest.begin() + static_cast<std::ptrdiff_t>(val_count),
                           rest.begin() + static_cast<std::ptrdiff_t>(val_count + test_count));
    std::sort(out.splits.train.begin(), out.splits.train.end());
    std::sort(out.splits.val.begin(), out.splits.val.end());
    std::sort(out.splits.test.begin(), out.splits.test.end());
    return out;
}

Dataset subsample_split(const Dataset& ds, double train_fraction, Rng& rng, std::size_t val_count,
                        std::size_t test_count, std::vector<std::string>* warnings) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0))
        fail(Errc::invalid_argument, "train fraction must lie in (0, 1]");
    const auto count = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.num_nodes())));
    return resample_split(ds, count, val_count, test_count, rng, warnings);
}

}  // namespace agcn
