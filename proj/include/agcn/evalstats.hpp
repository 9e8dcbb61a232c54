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
#include <span>
#include <string>
#include <vector>

#include "agcn/linalg.hpp"

namespace agcn {

/// Row argmax; ties go to the smaller class index.
std::size_t argmax_row(const Matrix& m, std::size_t row);

/// Fraction of masked nodes whose argmax class equals the label.
double accuracy(const Matrix& probabilities, std::span<const int> labels, std::span<const std::size_t> mask);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> xs);

struct AccuracySample {
    std::string method;
    std::vector<double> accuracies;
};

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double ss_between = 0.0;
    double ss_within = 0.0;
};

/// One-way analysis of variance across groups. Needs at least two groups
/// of at least two samples each.
AnovaResult one_way_anova(std::span<const AccuracySample> groups);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

/// P(F > f) for the F(d1, d2) distribution.
double f_distribution_upper_tail(double f, double d1, double d2);

}  // namespace agcn
