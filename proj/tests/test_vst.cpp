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

#include <cmath>

#include "seqmult/simlab.hpp"
#include "seqmult/stochastics.hpp"
#include "seqmult/vst.hpp"
#include "testutil.hpp"

using namespace seqmult;

TEST_CASE("transform maps a balanced binomial batch to zero") {
    const TransformedObs obs = transform({50, 50}, 100);
    CHECK(obs.L.size() == 1);
    CHECK(obs.L[0] == 0.0);
}

TEST_CASE("transform of an extreme batch stays inside the principal branch") {
    // asin(1 / (1 + 0.75/8)) = asin(0.914285714...)
    const TransformedObs obs = transform({8, 0}, 8);
    CHECK(obs.L[0] == doctest::Approx(1.1537410325091204).epsilon(1e-12));
    CHECK(obs.L[0] < 1.5707963267948966);
}

TEST_CASE("equal counts give equal transformed coordinates") {
    const TransformedObs obs = transform({25, 25, 50}, 100);
    CHECK(obs.L[0] == obs.L[1]);
    CHECK(obs.L[0] == doctest::Approx(std::asin(-0.5 / 1.0075)));
}

TEST_CASE("transform rejects an inconsistent batch") {
    CHECK_THROWS_AS(transform({50, 49}, 100), ValidationError);
}

TEST_CASE("inverse transform undoes the transform on interior batches") {
    RngStream rng(21, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const long long n = 50 + static_cast<long long>(rng.uniform_below(5000));
        const Vector p = sample_dirichlet(Vector{2.0, 2.0, 2.0}, rng);
        const std::vector<long long> counts = sample_multinomial(n, p, rng);
        const TransformedObs obs = transform(counts, n);
        const Vector recovered = inverse_transform(obs);
        for (std::size_t c = 0; c < counts.size(); ++c)
            CHECK(recovered[c] ==
                  doctest::Approx(static_cast<double>(counts[c]) / static_cast<double>(n))
                      .epsilon(1e-12));
    }
}

TEST_CASE("inverse transform at zero is the balanced point") {
    const Vector p = inverse_transform(TransformedObs{{0.0}, 100, kDefaultVstA});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("inverse transform clamps boundary overshoot") {
    // L = pi/2 with n = 8: raw p1 = (1 + 1.09375)/2 > 1, clamped to 1.
    const Vector p = inverse_transform(TransformedObs{{1.5707963267948966}, 8, kDefaultVstA});
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
}

TEST_CASE("asymptotic mean formula") {
    CHECK(asymptotic_mean(Vector{0.5, 0.5})[0] == 0.0);
    CHECK(asymptotic_mean(Vector{1.0, 0.0})[0] == doctest::Approx(1.5707963267948966));
    CHECK(asymptotic_mean(Vector{0.25, 0.75})[0] == doctest::Approx(-0.5235987755982989));
}

TEST_CASE("limiting correlation matrix") {
    SUBCASE("binomial case is the 1x1 identity") {
        const SpdMatrix m = limiting_corr_iid(Vector{0.3, 0.7});
        CHECK(m.dim() == 1);
        CHECK(m(0, 0) == 1.0);
    }
    SUBCASE("uniform three-category case") {
        const SpdMatrix m = limiting_corr_iid(Vector{1.0 / 3, 1.0 / 3, 1.0 / 3});
        CHECK(m(0, 0) == 1.0);
        CHECK(m(1, 1) == 1.0);
        CHECK(m(0, 1) == doctest::Approx(-0.5));
    }
    SUBCASE("asymmetric case") {
        const SpdMatrix m = limiting_corr_iid(Vector{0.5, 0.25, 0.25});
        CHECK(m(0, 1) == doctest::Approx(-0.5773502691896257));
    }
    SUBCASE("boundary p is rejected") {
        CHECK_THROWS_AS(limiting_corr_iid(Vector{1.0, 0.0}), ValidationError);
    }
    SUBCASE("unit diagonal, off-diagonals in (-1, 0)") {
        RngStream rng(22, 0);
        for (int t = 0; t < 100; ++t) {
            const Vector p = sample_dirichlet(Vector{1.0, 1.0, 1.0, 1.0}, rng);
            const SpdMatrix m = limiting_corr_iid(p);
            for (int i = 0; i < m.dim(); ++i) {
                CHECK(m(i, i) == 1.0);
                for (int j = 0; j < i; ++j) {
                    CHECK(m(i, j) < 0.0);
                    CHECK(m(i, j) > -1.0);
                }
            }
        }
    }
}

TEST_CASE("multinomial covariance block") {
    SUBCASE("binomial case") {
        const SpdMatrix m = multinomial_cov_iid(Vector{0.5, 0.5});
        CHECK(m(0, 0) == doctest::Approx(0.25));
    }
    SUBCASE("uniform three-category case") {
        const SpdMatrix m = multinomial_cov_iid(Vector{1.0 / 3, 1.0 / 3, 1.0 / 3});
        CHECK(m(0, 0) == doctest::Approx(2.0 / 9.0));
        CHECK(m(0, 1) == doctest::Approx(-1.0 / 9.0));
    }
    SUBCASE("SPD for interior p") {
        RngStream rng(23, 0);
        for (int t = 0; t < 100; ++t) {
            const Vector p = sample_dirichlet(Vector{1.0, 1.0, 1.0, 1.0, 1.0}, rng);
            CHECK_NOTHROW(cholesky(multinomial_cov_iid(p).raw()));
        }
    }
}

TEST_CASE("unconditional moments, batch forms") {
    SUBCASE("no perturbation reduces to the plain multinomial") {
        const MomentResult m = unconditional_moments(Vector{0.5, 0.5}, 100, SpdMatrix(Matrix(1)));
        CHECK(m.mean[0] == doctest::Approx(50.0));
        CHECK(m.cov(0, 0) == doctest::Approx(25.0));
        CHECK(m.cov(0, 1) == doctest::Approx(-25.0));
    }
    SUBCASE("perturbation variance enters with weight n(n-1)") {
        Matrix eps(1);
        eps(0, 0) = 0.001;
        const MomentResult m = unconditional_moments(Vector{0.5, 0.5}, 10, SpdMatrix(eps));
        CHECK(m.cov(0, 0) == doctest::Approx(2.59));
    }
    SUBCASE("cumulative form sums over rounds") {
        Matrix eps(1);
        eps(0, 0) = 0.001;
        const MomentResult m = cumulative_moments(
            Vector{0.5, 0.5}, {10, 10}, {SpdMatrix(eps), SpdMatrix(eps)});
        CHECK(m.mean[0] == doctest::Approx(10.0));
        CHECK(m.cov(0, 0) == doctest::Approx(2.0 * 2.59));
    }
}

TEST_CASE("unconditional moments match Monte Carlo under a perturbed DGP") {
    // Smaller-scale version of the moment check: C=3, n=2000, DGP2-style
    // truncated perturbations.
    RngStream rng(24, 0);
    const Vector p{0.45, 0.35, 0.20};
    const long long n = 2000;
    const SpdMatrix nominal_cov(std::pow(static_cast<double>(n), -0.5) * Matrix::identity(2));

    // Realized perturbation moments, estimated separately: truncation on an
    // asymmetric support leaves a small nonzero mean, so the formula is
    // instantiated at the effective cell probabilities p + E[eps].
    const int eps_reps = 400000;
    std::vector<std::vector<double>> eps_draws(2, std::vector<double>());
    for (auto& v : eps_draws) v.reserve(eps_reps);
    for (int i = 0; i < eps_reps; ++i) {
        const Vector e = sample_truncated_mvn_on_simplex(p, nominal_cov, rng);
        eps_draws[0].push_back(e[0]);
        eps_draws[1].push_back(e[1]);
    }
    Matrix eps_cov(2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            eps_cov(a, b) = a == b ? testutil::variance(eps_draws[static_cast<std::size_t>(a)])
                                   : testutil::covariance(eps_draws[0], eps_draws[1]);
    const double m0 = testutil::mean(eps_draws[0]);
    const double m1 = testutil::mean(eps_draws[1]);
    const Vector p_eff{p[0] + m0, p[1] + m1, p[2] - m0 - m1};
    const MomentResult expected = unconditional_moments(p_eff, n, SpdMatrix(symmetrize(eps_cov)));

    const int reps = 20000;
    std::vector<std::vector<double>> xs(3, std::vector<double>());
    for (auto& v : xs) v.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        const Vector e = sample_truncated_mvn_on_simplex(p, nominal_cov, rng);
        Vector pr{p[0] + e[0], p[1] + e[1], p[2] - e[0] - e[1]};
        const auto x = sample_multinomial(n, pr, rng);
        for (std::size_t c = 0; c < 3; ++c) xs[c].push_back(static_cast<double>(x[c]));
    }
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(std::fabs(testutil::mean(xs[c]) - expected.mean[c]) <
              3.0 * testutil::se_mean(xs[c]));
        const double se = testutil::se_cov(xs[c], xs[c]);
        CHECK(std::fabs(testutil::variance(xs[c]) -
                        expected.cov(static_cast<int>(c), static_cast<int>(c))) < 3.0 * se);
    }
    CHECK(std::fabs(testutil::covariance(xs[0], xs[1]) - expected.cov(0, 1)) <
          3.0 * testutil::se_cov(xs[0], xs[1]));
}

TEST_CASE("variance stabilization holds for the binomial at n = 10^4") {
    // Quick check at p = 0.5; the full sweep runs in the acceptance suite.
    RngStream rng(25, 0);
    const long long n = 10000;
    const int reps = 20000;
    std::vector<double> scaled;
    scaled.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        const long long x = sample_binomial(n, 0.5, rng);
        const TransformedObs obs = transform({x, n - x}, n);
        scaled.push_back(std::sqrt(static_cast<double>(n) + 0.5) * obs.L[0]);
    }
    CHECK(testutil::variance(scaled) > 0.9);
    CHECK(testutil::variance(scaled) < 1.1);
}

TEST_CASE("transform is strictly increasing in each count") {
    RngStream rng(26, 0);
    for (int t = 0; t < 200; ++t) {
        const long long n = 20 + static_cast<long long>(rng.uniform_below(1000));
        const long long x = static_cast<long long>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        const TransformedObs lo = transform({x, n - x}, n);
        const TransformedObs hi = transform({x + 1, n - x - 1}, n);
        CHECK(hi.L[0] > lo.L[0]);
    }
}
