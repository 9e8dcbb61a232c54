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

#include "agcn/evalstats.hpp"

#include <cmath>
#include <limits>

#include "agcn/error.hpp"

namespace agcn {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double x, double a, double b) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEpsilon) return h;
    }
    fail(Errc::no_convergence, "incomplete beta continued fraction did not converge");
}

}  // namespace

std::size_t argmax_row(const Matrix& m, std::size_t row) {
    auto r = m.row(row);
    std::size_t best = 0;
    for (std::size_t c = 1; c < r.size(); ++c)
        if (r[c] > r[best]) best = c;
    return best;
}

double accuracy(const Matrix& probabilities, std::span<const int> labels, std::span<const std::size_t> mask) {
    if (mask.empty()) fail(Errc::empty_mask, "accuracy: mask is empty");
    std::size_t correct = 0;
    for (std::size_t i : mask) {
        if (i >= probabilities.rows() || i >= labels.size())
            fail(Errc::index_out_of_range, "accuracy: mask index " + std::to_string(i) + " out of range");
        if (labels[i] >= 0 && argmax_row(probabilities, i) == static_cast<std::size_t>(labels[i])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(mask.size());
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double total = 0.0;
    for (double x : xs) total += x;
    return total / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) fail(Errc::invalid_argument, "incomplete beta needs positive shape parameters");
    if (!(x >= 0.0 && x <= 1.0)) fail(Errc::invalid_argument, "incomplete beta argument outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The continued fraction converges fastest below the mean; use symmetry otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double f_distribution_upper_tail(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) fail(Errc::invalid_argument, "F distribution needs positive degrees of freedom");
    if (std::isinf(f)) return 0.0;
    if (!(f > 0.0)) return 1.0;
    return regularized_incomplete_beta(d2 / (d2 + d1 * f), 0.5 * d2, 0.5 * d1);
}

AnovaResult one_way_anova(std::span<const AccuracySample> groups) {
    if (groups.size() < 2) fail(Errc::invalid_argument, "ANOVA needs at least two groups");
    std::size_t total_n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.accuracies.size() < 2)
            fail(Errc::invalid_argument, "ANOVA group '" + g.method + "' needs at least two samples");
        for (double x : g.accuracies) {
            if (!std::isfinite(x)) fail(Errc::non_finite, "ANOVA group '" + g.method + "' has a non-finite sample");
            grand += x;
        }
        total_n += g.accuracies.size();
    }
    grand /= static_cast<double>(total_n);

    AnovaResult r;
    for (const auto& g : groups) {
        const double mu = mean(g.accuracies);
        r.ss_between += static_cast<double>(g.accuracies.size()) * (mu - grand) * (mu - grand);
        for (double x : g.accuracies) r.ss_within += (x - mu) * (x - mu);
    }
    r.df_between = groups.size() - 1;
    r.df_within = total_n - groups.size();
    const double ms_between = r.ss_between / static_cast<double>(r.df_between);
    const double ms_within = r.ss_within / static_cast<double>(r.df_within);
    if (ms_within == 0.0) {
        if (ms_between == 0.0)
            fail(Errc::undefined_statistic, "ANOVA F is undefined: no variance within or between groups");
        r.f = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.f = ms_between / ms_within;
    r.p = f_distribution_upper_tail(r.f, static_cast<double>(r.df_between), static_cast<double>(r.df_within));
    return r;
}

}  // namespace agcn
