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
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace agcn {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_offsets{0};
    std::vector<std::size_t> col_indices;
    std::vector<double> values;

    std::size_t nnz() const noexcept { return col_indices.size(); }
    std::size_t row_begin(std::size_t r) const noexcept { return row_offsets[r]; }
    std::size_t row_end(std::size_t r) const noexcept { return row_offsets[r + 1]; }

    /// Stored value at (r, c), or 0 when the entry is structurally absent.
    double at(std::size_t r, std::size_t c) const;
    Matrix to_dense() const;

    static CsrMatrix identity(std::size_t n);
    /// Builds from a dense matrix, storing every nonzero.
    static CsrMatrix from_dense(const Matrix& m);
};

/// SplitMix64. One 64-bit word of state, so a seed fully determines the
/// stream on every platform.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform on {0, ..., n-1}; n must be positive.
    std::size_t uniform_index(std::size_t n) noexcept;
    /// Independent child stream derived from the current state and a tag.
    Rng fork(std::uint64_t stream) const noexcept;

    template <typename T>
    void shuffle(std::vector<T>& items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    result_type operator()() noexcept { return next_u64(); }
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t state_;
};

// Every product below accumulates in ascending inner index, so results are
// bit-reproducible.
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ·b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a·bᵀ without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix spmm(const CsrMatrix& s, const Matrix& h);
Matrix transpose(const Matrix& a);

Matrix softmax_rows(const Matrix& z);
Matrix relu(const Matrix& z);

void scale_inplace(Matrix& a, double s) noexcept;
/// dst += alpha * src
void axpy(Matrix& dst, double alpha, const Matrix& src);
void hadamard_inplace(Matrix& dst, const Matrix& src);
/// Frobenius inner product.
double dot(const Matrix& a, const Matrix& b);
double squared_norm(const Matrix& a) noexcept;
double max_abs_diff(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& a) noexcept;
/// Throws Errc::non_finite naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& a, std::string_view what);

/// Entries i.i.d. uniform on [-a, a] with a = sqrt(6 / (rows + cols)).
Matrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols);

}  // namespace agcn
