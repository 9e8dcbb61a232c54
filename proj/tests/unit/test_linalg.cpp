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

#include <cmath>

#include "agcn/error.hpp"
#include "agcn/linalg.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace agcn;
using agcn::testing::random_matrix;

TEST_CASE("matmul hand cases") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix b = Matrix::from_rows({{5}, {6}});
    CHECK(matmul(a, b) == Matrix::from_rows({{17}, {39}}));

    const Matrix c = Matrix::from_rows({{1, -2, 3}, {0.5, 0, 7}});
    CHECK(matmul(Matrix::identity(2), c) == c);

    const Matrix empty = matmul(Matrix(0, 4), Matrix(4, 3));
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 3);

    try {
        (void)matmul(a, Matrix(3, 1));
        FAIL("expected a shape error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::shape_mismatch);
    }
}

TEST_CASE("matmul agrees with the dense oracle and is associative") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + rng.uniform_index(6), k = 1 + rng.uniform_index(6), p = 1 + rng.uniform_index(6),
                          q = 1 + rng.uniform_index(6);
        const Matrix a = random_matrix(rng, m, k), b = random_matrix(rng, k, p), c = random_matrix(rng, p, q);
        CHECK(max_abs_diff(matmul(a, b), agcn::testing::dense_matmul(a, b)) < 1e-14);
        const Matrix left = matmul(matmul(a, b), c), right = matmul(a, matmul(b, c));
        CHECK(max_abs_diff(left, right) <= 1e-9 * std::max(1.0, std::sqrt(squared_norm(left))));
    }
}

TEST_CASE("transposed products match explicit transposes") {
    Rng rng(5);
    const Matrix a = random_matrix(rng, 4, 3), b = random_matrix(rng, 4, 2), c = random_matrix(rng, 5, 3);
    CHECK(max_abs_diff(matmul_tn(a, b), matmul(transpose(a), b)) < 1e-15);
    CHECK(max_abs_diff(matmul_nt(a, c), matmul(a, transpose(c))) < 1e-15);
}

TEST_CASE("spmm") {
    const Matrix h = Matrix::from_rows({{1}, {0}});
    const CsrMatrix half = CsrMatrix::from_dense(Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}));
    CHECK(spmm(half, h) == Matrix::from_rows({{0.5}, {0.5}}));
    CHECK(spmm(CsrMatrix::identity(2), h) == h);
    CHECK(spmm(CsrMatrix::from_dense(Matrix(2, 2)), h) == Matrix(2, 1));

    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(50);
        Matrix d(n, n);
        for (double& v : d.values())
            if (rng.uniform() < 0.2) v = rng.uniform(-2, 2);
        const Matrix x = random_matrix(rng, n, 3);
        const Matrix expect = agcn::testing::dense_matmul(d, x);
        const Matrix got = spmm(CsrMatrix::from_dense(d), x);
        CHECK(max_abs_diff(got, expect) <= 1e-12 * std::max(1.0, std::sqrt(squared_norm(expect))));
    }
}

TEST_CASE("csr lookups") {
    const CsrMatrix s = CsrMatrix::from_dense(Matrix::from_rows({{0, 2}, {3, 0}}));
    CHECK(s.nnz() == 2);
    CHECK(s.at(0, 1) == 2.0);
    CHECK(s.at(0, 0) == 0.0);
    CHECK_THROWS_AS((void)s.at(2, 0), Error);
    CHECK(s.to_dense() == Matrix::from_rows({{0, 2}, {3, 0}}));
}

TEST_CASE("softmax_rows") {
    const Matrix p = softmax_rows(Matrix::from_rows({{0, 0}, {1000, 0}}));
    CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p(1, 0) == doctest::Approx(1.0));
    CHECK(p(1, 1) < 1e-300);

    const Matrix q = softmax_rows(Matrix::from_rows({{0, std::log(2.0), std::log(3.0)}}));
    CHECK(q(0, 0) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(q(0, 1) == doctest::Approx(2.0 / 6).epsilon(1e-14));
    CHECK(q(0, 2) == doctest::Approx(3.0 / 6).epsilon(1e-14));

    Rng rng(17);
    const Matrix z = random_matrix(rng, 10000, 5, -1000, 1000);
    const Matrix s = softmax_rows(z);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i) {
        double sum = 0.0;
        for (double v : s.row(i)) {
            CHECK_FALSE(v < 0.0);
            sum += v;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("glorot_init") {
    Rng a(99), b(99);
    CHECK(glorot_init(a, 20, 7) == glorot_init(b, 20, 7));

    Rng one(1);
    const Matrix w = glorot_init(one, 1, 1);
    CHECK(std::abs(w(0, 0)) <= std::sqrt(3.0));

    Rng big(2024);
    const Matrix m = glorot_init(big, 1000, 1000);
    double sum = 0.0, worst = 0.0;
    for (double v : m.values()) {
        sum += v;
        worst = std::max(worst, std::abs(v));
    }
    CHECK(std::abs(sum / static_cast<double>(m.size())) < 0.01);
    CHECK(worst <= std::sqrt(6.0 / 2000.0));
    CHECK_THROWS_AS((void)glorot_init(big, 0, 3), Error);
}

TEST_CASE("rng streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // Published first output of SplitMix64 seeded with 0.
    Rng zero(0);
    CHECK(zero.next_u64() == 0xE220A8397B1DCDAFULL);

    Rng r(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(r.uniform_index(7) < 7);
    }

    const Rng base(5);
    Rng f1 = base.fork(1), f2 = base.fork(2), f1_again = base.fork(1);
    CHECK(f1.next_u64() != f2.next_u64());
    f1 = base.fork(1);
    CHECK(f1.next_u64() == f1_again.next_u64());
}

TEST_CASE("finite checks") {
    Matrix m(2, 2, 1.0);
    CHECK(all_finite(m));
    m(1, 1) = std::nan("");
    CHECK_FALSE(all_finite(m));
    try {
        require_finite(m, "weights");
        FAIL("expected non_finite");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_finite);
        CHECK(std::string(e.what()).find("weights") != std::string::npos);
    }
}
