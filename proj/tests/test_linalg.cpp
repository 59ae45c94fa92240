// Copyright (c) 2026 the seqmult authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seqmult/linalg.hpp"

using namespace seqmult;

TEST_CASE("cholesky reproduces the factorization of a known SPD matrix") {
    Matrix m(2);
    m(0, 0) = 4.0; m(0, 1) = 2.0;
    m(1, 0) = 2.0; m(1, 1) = 3.0;
    const Matrix l = cholesky(m);
    CHECK(l(0, 0) == doctest::Approx(2.0));
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(l(0, 1) == 0.0);
}

TEST_CASE("cholesky rejects an indefinite matrix and names it") {
    Matrix m(2);
    m(0, 0) = 1.0; m(0, 1) = 2.0;
    m(1, 0) = 2.0; m(1, 1) = 1.0;
    CHECK_THROWS_WITH_AS(cholesky(m, "test matrix"),
                         doctest::Contains("test matrix"), FactorizationError);
}

TEST_CASE("solve and inverse agree with hand computations") {
    Matrix m(3);
    m(0, 0) = 4; m(0, 1) = 1; m(0, 2) = 0.5;
    m(1, 0) = 1; m(1, 1) = 3; m(1, 2) = 0.2;
    m(2, 0) = 0.5; m(2, 1) = 0.2; m(2, 2) = 2;
    const Matrix l = cholesky(m);
    const Vector b{1.0, 2.0, 3.0};
    const Vector x = chol_solve(l, b);
    const Vector back = matvec(m, x);
    for (int i = 0; i < 3; ++i) CHECK(back[static_cast<std::size_t>(i)] == doctest::Approx(b[static_cast<std::size_t>(i)]));

    const Matrix inv = chol_inverse(l);
    const Matrix prod = matmul(m, inv);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));

    CHECK(chol_logdet(l) == doctest::Approx(std::log(4.0 * 3.0 * 2.0 - 4.0 * 0.04 - 0.25 * 3.0 -
                                                     1.0 * 2.0 + 2.0 * 0.1)));
}

TEST_CASE("lower triangular inverse") {
    Matrix l(2);
    l(0, 0) = 2.0; l(1, 0) = 1.0; l(1, 1) = 4.0;
    const Matrix inv = lower_tri_inverse(l);
    CHECK(inv(0, 0) == doctest::Approx(0.5));
    CHECK(inv(1, 0) == doctest::Approx(-0.125));
    CHECK(inv(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("SpdMatrix validates symmetry") {
    Matrix ok(2);
    ok(0, 0) = 1.0; ok(0, 1) = 0.5; ok(1, 0) = 0.5; ok(1, 1) = 1.0;
    CHECK_NOTHROW(SpdMatrix(ok, "ok"));

    Matrix bad(ok);
    bad(0, 1) = 0.6;
    CHECK_THROWS_AS(SpdMatrix(bad, "bad"), ValidationError);
}

TEST_CASE("jitter rescues an exactly singular but symmetric matrix") {
    Matrix m(2);
    m(0, 0) = 1.0; m(0, 1) = 1.0; m(1, 0) = 1.0; m(1, 1) = 1.0;
    CHECK_NOTHROW(cholesky(m, "singular"));
}

TEST_CASE("quadratic form and outer product") {
    const Vector u{1.0, 2.0};
    const Matrix o = outer(u, u);
    CHECK(o(0, 1) == 2.0);
    CHECK(quad_form(o, Vector{1.0, 1.0}) == doctest::Approx(9.0));
}
