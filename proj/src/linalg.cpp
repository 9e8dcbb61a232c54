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

#include "agcn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agcn/error.hpp"

namespace agcn {

namespace {

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(Errc::shape_mismatch, std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) fail(Errc::shape_mismatch, "Matrix::from_rows: ragged rows");
        std::copy(row.begin(), row.end(), m.row(i++).begin());
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
    if (r >= rows || c >= cols) fail(Errc::index_out_of_range, "CsrMatrix::at: index out of range");
    auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[r]);
    auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[r + 1]);
    auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return 0.0;
    return values[static_cast<std::size_t>(it - col_indices.begin())];
}

Matrix CsrMatrix::to_dense() const {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t p = row_offsets[r]; p < row_offsets[r + 1]; ++p) m(r, col_indices[p]) = values[p];
    return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    CsrMatrix s;
    s.rows = s.cols = n;
    s.row_offsets.resize(n + 1);
    s.col_indices.resize(n);
    s.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        s.row_offsets[i + 1] = i + 1;
        s.col_indices[i] = i;
    }
    return s;
}

CsrMatrix CsrMatrix::from_dense(const Matrix& m) {
    CsrMatrix s;
    s.rows = m.rows();
    s.cols = m.cols();
    s.row_offsets.assign(1, 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (m(r, c) != 0.0) {
                s.col_indices.push_back(c);
                s.values.push_back(m(r, c));
            }
        }
        s.row_offsets.push_back(s.col_indices.size());
    }
    return s;
}

std::uint64_t Rng::next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::size_t Rng::uniform_index(std::size_t n) noexcept {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t x = next_u64();
        if (x >= threshold) return static_cast<std::size_t>(x % bound);
    }
}

Rng Rng::fork(std::uint64_t stream) const noexcept {
    Rng mixer(state_ ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return Rng(mixer.next_u64());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        fail(Errc::shape_mismatch, "matmul: " + shape_str(a) + " times " + shape_str(b));
    Matrix out(a.rows(), b.cols());
    const std::size_t p = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* dst = out.row(i).data();
        auto arow = a.row(i);
        for (std::size_t k = 0; k < arow.size(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row(k).data();
            for (std::size_t j = 0; j < p; ++j) dst[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        fail(Errc::shape_mismatch, "matmul_tn: " + shape_str(a) + "^T times " + shape_str(b));
    Matrix out(a.cols(), b.cols());
    const std::size_t p = b.cols();
    // out(k, :) = sum_i a(i, k) * b(i, :), i ascending
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto arow = a.row(i);
        const double* brow = b.row(i).data();
        for (std::size_t k = 0; k < arow.size(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            double* dst = out.row(k).data();
            for (std::size_t j = 0; j < p; ++j) dst[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        fail(Errc::shape_mismatch, "matmul_nt: " + shape_str(a) + " times " + shape_str(b) + "^T");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto brow = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < arow.size(); ++k) acc += arow[k] * brow[k];
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix spmm(const CsrMatrix& s, const Matrix& h) {
    if (s.cols != h.rows())
        fail(Errc::shape_mismatch, "spmm: sparse " + std::to_string(s.rows) + "x" + std::to_string(s.cols) +
                                       " times " + shape_str(h));
    Matrix out(s.rows, h.cols());
    const std::size_t f = h.cols();
    for (std::size_t r = 0; r < s.rows; ++r) {
        double* dst = out.row(r).data();
        for (std::size_t p = s.row_offsets[r]; p < s.row_offsets[r + 1]; ++p) {
            const double w = s.values[p];
            const double* src = h.row(s.col_indices[p]).data();
            for (std::size_t j = 0; j < f; ++j) dst[j] += w * src[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix softmax_rows(const Matrix& z) {
    if (z.cols() == 0) fail(Errc::shape_mismatch, "softmax_rows: zero columns");
    Matrix out(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.rows(); ++i) {
        auto in = z.row(i);
        auto dst = out.row(i);
        const double peak = *std::max_element(in.begin(), in.end());
        double total = 0.0;
        for (std::size_t c = 0; c < in.size(); ++c) {
            dst[c] = std::exp(in[c] - peak);
            total += dst[c];
        }
        for (double& v : dst) v /= total;
    }
    return out;
}

Matrix relu(const Matrix& z) {
    Matrix out = z;
    for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
    return out;
}

void scale_inplace(Matrix& a, double s) noexcept {
    for (double& v : a.values()) v *= s;
}

void axpy(Matrix& dst, double alpha, const Matrix& src) {
    require_same_shape(dst, src, "axpy");
    auto d = dst.values();
    auto s = src.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += alpha * s[i];
}

void hadamard_inplace(Matrix& dst, const Matrix& src) {
    require_same_shape(dst, src, "hadamard");
    auto d = dst.values();
    auto s = src.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= s[i];
}

double dot(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "dot");
    auto x = a.values();
    auto y = b.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double squared_norm(const Matrix& a) noexcept {
    double acc = 0.0;
    for (double v : a.values()) acc += v * v;
    return acc;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    auto x = a.values();
    auto y = b.values();
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

bool all_finite(const Matrix& a) noexcept {
    return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

void require_finite(const Matrix& a, std::string_view what) {
    if (!all_finite(a)) fail(Errc::non_finite, std::string(what) + ": non-finite entry");
}

Matrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) fail(Errc::invalid_argument, "glorot_init: empty shape");
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix w(rows, cols);
    for (double& v : w.values()) v = rng.uniform(-bound, bound);
    return w;
}

}  // namespace agcn
