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

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include <unistd.h>

#include "agcn/dataset.hpp"
#include "agcn/error.hpp"
#include "fixtures.hpp"

using namespace agcn;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed when the test case ends.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("agcn-dataset-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

Dataset small_dataset() {
    Dataset ds;
    ds.name = "tiny";
    const std::vector<Edge> e{{0, 1, 1.0}, {0, 3, 0.25}, {1, 2, 2.0}};
    ds.graph = build_graph(4, e);
    ds.features = Matrix::from_rows({{1, 0, 0.5}, {0, 2, 0}, {0.1, 0.2, 0.3}, {0, 0, 0}});
    ds.labels = {0, 1, -1, 1};
    ds.num_classes = 2;
    ds.splits.train = {0};
    ds.splits.val = {1};
    ds.splits.test = {3};
    return ds;
}

Errc load_error(const fs::path& dir, std::string* message = nullptr) {
    try {
        (void)load_dataset(dir);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.code();
    }
    FAIL("load_dataset accepted a broken directory");
    return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("save writes the documented layout") {
    TempDir dir;
    save_dataset(small_dataset(), dir.path());
    CHECK(read(dir.path() / "meta.json") ==
          "{\"name\": \"tiny\", \"num_nodes\": 4, \"num_features\": 3, \"num_classes\": 2}\n");
    CHECK(read(dir.path() / "edges.tsv") == "0\t1\t1.0\n0\t3\t0.25\n1\t2\t2.0\n");
    CHECK(read(dir.path() / "labels.tsv") == "0\t0\n1\t1\n3\t1\n");
    CHECK(read(dir.path() / "splits.json") == "{\"train\": [0], \"val\": [1], \"test\": [3]}\n");
    const std::string bin = read(dir.path() / "features.bin");
    REQUIRE(bin.size() == 48);
    // 0.5f is 0x3F000000, stored little-endian.
    CHECK(bin.substr(8, 4) == std::string("\x00\x00\x00\x3f", 4));
    for (const auto& entry : fs::directory_iterator(dir.path())) CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("load/save/load is bit-identical") {
    TempDir a, b;
    Dataset ds = agcn::testing::citation_like_dataset({.nodes = 200, .features = 40, .val = 50, .test = 80});
    // Non-integral weights exercise the weight formatter.
    std::vector<Edge> edges = ds.graph.edges();
    Rng rng(1);
    for (Edge& e : edges) e.weight = rng.uniform(0.01, 3.0);
    ds.graph = build_graph(ds.num_nodes(), edges);
    for (double& v : ds.features.values()) v = static_cast<float>(v * rng.uniform(0, 1));

    save_dataset(ds, a.path());
    const Dataset loaded = load_dataset(a.path());
    save_dataset(loaded, b.path());
    for (const char* f : {"meta.json", "edges.tsv", "features.bin", "labels.tsv", "splits.json"})
        CHECK(read(a.path() / f) == read(b.path() / f));
    CHECK(loaded.features == ds.features);
    CHECK(loaded.labels == ds.labels);
    CHECK(loaded.splits.test == ds.splits.test);
    CHECK(loaded.graph.edges().size() == edges.size());
    CHECK(loaded.graph.edges()[3].weight == edges[3].weight);
}

TEST_CASE("format_weight follows shortest round-trip repr") {
    CHECK(format_weight(1.0) == "1.0");
    CHECK(format_weight(0.1) == "0.1");
    CHECK(format_weight(2.5) == "2.5");
    CHECK(format_weight(1e-7) == "1e-07");
    CHECK(format_weight(1e16) == "1e+16");
    CHECK(format_weight(123456.0) == "123456.0");
    CHECK(std::stod(format_weight(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("load errors name the file") {
    TempDir dir;
    save_dataset(small_dataset(), dir.path());
    std::string msg;

    const std::string bin = read(dir.path() / "features.bin");
    write(dir.path() / "features.bin", bin.substr(0, 40));
    CHECK(load_error(dir.path(), &msg) == Errc::format_error);
    CHECK(msg.find("features.bin") != std::string::npos);
    CHECK(msg.find("48") != std::string::npos);
    write(dir.path() / "features.bin", bin);

    const std::string edges = read(dir.path() / "edges.tsv");
    write(dir.path() / "edges.tsv", "0\t1\t1.0\n0\t1\t1.0\n");
    CHECK(load_error(dir.path(), &msg) == Errc::format_error);
    CHECK(msg.find("edges.tsv:2") != std::string::npos);
    write(dir.path() / "edges.tsv", "2\t2\t1.0\n");
    CHECK(load_error(dir.path()) == Errc::format_error);
    write(dir.path() / "edges.tsv", "0\t1\t-1.0\n");
    CHECK(load_error(dir.path()) == Errc::format_error);
    write(dir.path() / "edges.tsv", edges);

    write(dir.path() / "splits.json", "{\"train\": [0], \"val\": [0], \"test\": [3]}");
    CHECK(load_error(dir.path()) == Errc::invariant_violation);
    write(dir.path() / "splits.json", "{\"train\": [0], \"val\": [2], \"test\": [3]}");
    CHECK(load_error(dir.path(), &msg) == Errc::invariant_violation);
    CHECK(msg.find("no label") != std::string::npos);
    write(dir.path() / "splits.json", "{\"train\": [0], \"val\": [1]}");
    CHECK(load_error(dir.path()) == Errc::format_error);

    fs::remove(dir.path() / "labels.tsv");
    CHECK(load_error(dir.path(), &msg) == Errc::io_error);
    CHECK(msg.find("labels.tsv") != std::string::npos);
    CHECK(load_error(dir.path() / "nowhere") == Errc::io_error);
}

TEST_CASE("row_normalize") {
    const Matrix r = row_normalize(Matrix::from_rows({{2, 2}, {0, 0}, {1, 3}, {-1, 3}}));
    CHECK(r == Matrix::from_rows({{0.5, 0.5}, {0, 0}, {0.25, 0.75}, {-0.25, 0.75}}));

    Rng rng(4);
    const Matrix x = agcn::testing::random_matrix(rng, 300, 7, -3, 3);
    const Matrix n = row_normalize(x);
    for (std::size_t i = 0; i < n.rows(); ++i) {
        double s = 0.0;
        for (double v : n.row(i)) s += std::abs(v);
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("label_rate") {
    Dataset ds = small_dataset();
    CHECK(label_rate(ds) == 0.25);
    ds.splits = {};
    CHECK(label_rate(ds) == 0.0);
    ds.labels = {0, 1, 0, 1};
    ds.splits.train = {0, 1, 2, 3};
    CHECK(label_rate(ds) == 1.0);
}

TEST_CASE("subsample_split") {
    agcn::testing::CitationLikeOptions o;
    o.nodes = 2708;
    o.classes = 7;
    o.features = 70;
    const Dataset big = agcn::testing::citation_like_dataset(o);
    Rng rng(42);
    const Dataset s = subsample_split(big, 0.005, rng);
    CHECK(s.splits.train.size() == 14);
    CHECK(s.splits.val.size() == 500);
    CHECK(s.splits.test.size() == 1000);
    std::set<int> classes;
    for (std::size_t i : s.splits.train) classes.insert(s.labels[i]);
    CHECK(classes.size() == 7);

    Rng again(42);
    CHECK(subsample_split(big, 0.005, again).splits.train == s.splits.train);

    // One node per class exactly.
    Rng r7(9);
    const Dataset seven = subsample_split(big, 7.0 / 2708.0, r7);
    std::vector<int> per(7, 0);
    for (std::size_t i : seven.splits.train) ++per[static_cast<std::size_t>(seven.labels[i])];
    CHECK(per == std::vector<int>(7, 1));

    // Too few nodes for every class.
    std::vector<std::string> warnings;
    Rng r3(1);
    const Dataset three = subsample_split(big, 3.0 / 2708.0, r3, 500, 1000, &warnings);
    CHECK(three.splits.train.size() == 3);
    CHECK_FALSE(warnings.empty());

    CHECK_THROWS_AS((void)subsample_split(big, 0.0, rng), Error);
    CHECK_THROWS_AS((void)subsample_split(big, 1.5, rng), Error);
}

TEST_CASE("subsample_split outputs are disjoint and in range for many seeds") {
    const Dataset ds = agcn::testing::citation_like_dataset({.nodes = 300, .features = 20, .val = 60, .test = 100});
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(seed);
        const Dataset s = subsample_split(ds, 0.05, rng, 60, 100);
        std::vector<int> seen(ds.num_nodes(), 0);
        bool ok = true;
        for (const auto* split : {&s.splits.train, &s.splits.val, &s.splits.test})
            for (std::size_t i : *split) ok = ok && i < ds.num_nodes() && ++seen[i] == 1;
        ok = ok && std::is_sorted(s.splits.train.begin(), s.splits.train.end());
        ok = ok && s.splits.train.size() == 15 && s.splits.val.size() == 60 && s.splits.test.size() == 100;
        if (!ok) {
            CAPTURE(seed);
            FAIL("bad split");
        }
    }
}
