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

#include "agcn/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agcn/error.hpp"
#include "agcn/evalstats.hpp"
#include "parallel.hpp"

namespace agcn {

namespace {

constexpr double kCgTolerance = 1e-10;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// y = (λI + L) x
void shifted_laplacian_apply(const CsrMatrix& lap, double lambda, const std::vector<double>& x,
                             std::vector<double>& y) {
    for (std::size_t r = 0; r < lap.rows; ++r) {
        double acc = lambda * x[r];
        for (std::size_t p = lap.row_begin(r); p < lap.row_end(r); ++p) acc += lap.values[p] * x[lap.col_indices[p]];
        y[r] = acc;
    }
}

std::vector<double> conjugate_gradient(const CsrMatrix& lap, double lambda, const std::vector<double>& b,
                                       std::size_t column) {
    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0), r = b, p = b, ap(n, 0.0);
    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) return x;
    double rs = dot(r, r);
    const std::size_t max_iterations = std::max<std::size_t>(10 * n, 10);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        if (std::sqrt(rs) <= kCgTolerance * b_norm) return x;
        shifted_laplacian_apply(lap, lambda, p, ap);
        const double alpha = rs / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rs_next = dot(r, r);
        const double ratio = rs_next / rs;
        rs = rs_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + ratio * p[i];
    }
    if (std::sqrt(rs) <= kCgTolerance * b_norm) return x;
    fail(Errc::no_convergence, "random-walk confidence: conjugate gradients did not converge for class " +
                                   std::to_string(column) + " within " + std::to_string(max_iterations) +
                                   " iterations");
}

std::vector<int> labels_on(std::span<const std::size_t> mask, std::span<const int> labels, std::size_t n) {
    std::vector<int> out(n, -1);
    for (std::size_t i : mask) out[i] = labels[i];
    return out;
}

}  // namespace

const char* augment_method_name(AugmentMethod m) noexcept {
    switch (m) {
    case AugmentMethod::co_training: return "co";
    case AugmentMethod::self_training: return "self";
    case AugmentMethod::union_set: return "union";
    case AugmentMethod::intersection: return "intersection";
    }
    return "unknown";
}

ConfidenceTable parw_confidence(const NormalizedGraph& ng, std::span<const int> labels,
                                std::span<const std::size_t> train_mask, std::size_t num_classes, double lambda) {
    const std::size_t n = ng.num_nodes();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(Errc::invalid_argument, "walk lambda must be positive");
    if (train_mask.empty()) fail(Errc::empty_mask, "random-walk confidence needs labeled nodes");
    if (labels.size() != n) fail(Errc::shape_mismatch, "label vector length differs from node count");
    for (std::size_t i : train_mask) {
        if (i >= n) fail(Errc::index_out_of_range, "training index " + std::to_string(i) + " out of range");
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes)
            fail(Errc::label_out_of_range, "training node " + std::to_string(i) + " has no valid label");
    }

    ConfidenceTable table{Matrix(n, num_classes), ConfidenceSource::random_walk};
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::vector<double> b(n, 0.0);
        for (std::size_t i : train_mask)
            if (static_cast<std::size_t>(labels[i]) == c) b[i] = lambda;
        std::vector<double> col = conjugate_gradient(ng.laplacian, lambda, b, c);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(col[i])) fail(Errc::non_finite, "random-walk confidence is not finite");
            // CG can leave round-off negatives where the true solution is zero.
            table.scores(i, c) = std::max(col[i], 0.0);
        }
    }
    return table;
}

ExpandedLabels expand_labels(const ConfidenceTable& conf, std::span<const int> labels,
                             std::span<const std::size_t> train_mask, std::size_t additions_per_class,
                             std::span<const std::size_t> exclude) {
    if (additions_per_class < 1) fail(Errc::invalid_argument, "additions per class must be at least 1");
    const std::size_t n = conf.scores.rows();
    const std::size_t classes = conf.scores.cols();
    if (labels.size() != n) fail(Errc::shape_mismatch, "label vector length differs from confidence rows");

    std::vector<char> blocked(n, 0);
    for (std::size_t i : train_mask) {
        if (i >= n) fail(Errc::index_out_of_range, "training index " + std::to_string(i) + " out of range");
        blocked[i] = 1;
    }
    for (std::size_t i : exclude)
        if (i < n) blocked[i] = 1;

    ExpandedLabels out;
    out.base.assign(train_mask.begin(), train_mask.end());
    std::sort(out.base.begin(), out.base.end());
    out.labels = labels_on(train_mask, labels, n);

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i)
        if (!blocked[i]) candidates.push_back(i);
    if (candidates.empty()) {
        out.warnings.push_back("no unlabeled candidates left; training set unchanged");
        out.mask = out.base;
        return out;
    }
    if (candidates.size() < additions_per_class)
        out.warnings.push_back("only " + std::to_string(candidates.size()) + " unlabeled candidates for " +
                               std::to_string(additions_per_class) + " additions per class");

    const std::size_t take = std::min(additions_per_class, candidates.size());
    std::vector<int> winner(n, -1);
    for (std::size_t c = 0; c < classes; ++c) {
        std::vector<std::size_t> order = candidates;
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double ca = conf.scores(a, c), cb = conf.scores(b, c);
                              return ca != cb ? ca > cb : a < b;
                          });
        for (std::size_t m = 0; m < take; ++m) {
            const std::size_t node = order[m];
            // Classes are visited in ascending order, so a strict comparison keeps the smaller class on ties.
            if (winner[node] < 0 || conf.scores(node, c) > conf.scores(node, static_cast<std::size_t>(winner[node])))
                winner[node] = static_cast<int>(c);
        }
    }
    out.mask = out.base;
    for (std::size_t i = 0; i < n; ++i)
        if (winner[i] >= 0) {
            out.mask.push_back(i);
            out.labels[i] = winner[i];
        }
    std::sort(out.mask.begin(), out.mask.end());
    return out;
}

ExpandedLabels combine(const ExpandedLabels& a, const ExpandedLabels& b, AugmentMethod mode) {
    if (a.base != b.base) fail(Errc::invalid_argument, "combine: expansions come from different base training sets");
    if (a.labels.size() != b.labels.size()) fail(Errc::shape_mismatch, "combine: label vectors differ in length");
    const std::size_t n = a.labels.size();
    std::vector<char> in_a(n, 0), in_b(n, 0);
    for (std::size_t i : a.mask) in_a[i] = 1;
    for (std::size_t i : b.mask) in_b[i] = 1;

    ExpandedLabels out;
    out.base = a.base;
    out.labels.assign(n, -1);
    std::vector<char> is_base(n, 0);
    for (std::size_t i : a.base) is_base[i] = 1;

    for (std::size_t i = 0; i < n; ++i) {
        bool keep = false;
        int label = -1;
        if (mode == AugmentMethod::union_set) {
            keep = in_a[i] || in_b[i];
            label = in_a[i] ? a.labels[i] : b.labels[i];
        } else if (mode == AugmentMethod::intersection) {
            keep = is_base[i] || (in_a[i] && in_b[i] && a.labels[i] == b.labels[i]);
            label = a.labels[i];
        } else {
            fail(Errc::invalid_argument, "combine: mode must be union or intersection");
        }
        if (keep) {
            out.mask.push_back(i);
            out.labels[i] = label;
        }
    }
    return out;
}

std::size_t default_additions_per_class(std::size_t train_size, std::size_t num_classes) {
    if (num_classes == 0) return 1;
    return std::max<std::size_t>(1, (2 * train_size + num_classes - 1) / num_classes);
}

std::vector<AugmentRow> augment_eval(const TrainingContext& ctx, const ModelConfig& model_cfg,
                                     const TrainConfig& train_cfg, const std::vector<AugmentMethod>& methods,
                                     std::size_t additions_per_class, double walk_lambda) {
    train_cfg.validate();
    const Dataset& ds = ctx.dataset();
    const std::size_t runs = train_cfg.runs;
    // results[r][0] is the plain run; results[r][m + 1] follows `methods`.
    std::vector<std::vector<RunReport>> results(runs, std::vector<RunReport>(methods.size() + 1));

    detail::parallel_for(runs, train_cfg.threads, [&](std::size_t r) {
        const std::uint64_t seed = train_cfg.seed + r;
        std::vector<std::string> warnings;
        const Splits splits = splits_for_run(ds, train_cfg, seed, &warnings);
        TrainResult plain = train(ctx, splits, model_cfg, train_cfg, seed);
        plain.report.warnings = warnings;

        const std::size_t k = additions_per_class > 0 ? additions_per_class
                                                      : default_additions_per_class(splits.train.size(), ds.num_classes);
        auto needs = [&](AugmentMethod m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
        const bool need_co = needs(AugmentMethod::co_training) || needs(AugmentMethod::union_set) ||
                             needs(AugmentMethod::intersection);
        const bool need_self = needs(AugmentMethod::self_training) || needs(AugmentMethod::union_set) ||
                               needs(AugmentMethod::intersection);
        ExpandedLabels co, self;
        if (need_co)
            co = expand_labels(parw_confidence(ctx.graph(), ds.labels, splits.train, ds.num_classes, walk_lambda),
                               ds.labels, splits.train, k, splits.val);
        if (need_self)
            self = expand_labels(ConfidenceTable{predict(ctx, plain.model), ConfidenceSource::model}, ds.labels,
                                 splits.train, k, splits.val);

        results[r][0] = std::move(plain.report);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            ExpandedLabels expanded;
            switch (methods[m]) {
            case AugmentMethod::co_training: expanded = co; break;
            case AugmentMethod::self_training: expanded = self; break;
            default: expanded = combine(co, self, methods[m]); break;
            }
            const LabelTargets targets = expanded.targets();
            RunReport rep = train(ctx, splits, model_cfg, train_cfg, seed, &targets).report;
            rep.warnings = warnings;
            rep.warnings.insert(rep.warnings.end(), expanded.warnings.begin(), expanded.warnings.end());
            results[r][m + 1] = std::move(rep);
        }
    });

    std::vector<AugmentRow> rows(methods.size() + 1);
    for (std::size_t m = 0; m <= methods.size(); ++m) {
        rows[m].method = m == 0 ? "plain" : augment_method_name(methods[m - 1]);
        for (std::size_t r = 0; r < runs; ++r) {
            rows[m].accuracies.push_back(results[r][m].test_accuracy);
            rows[m].runs.push_back(std::move(results[r][m]));
        }
        rows[m].mean = mean(rows[m].accuracies);
        rows[m].std = sample_std(rows[m].accuracies);
    }
    return rows;
}

}  // namespace agcn
