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

#include "seqmult/model.hpp"
#include "testutil.hpp"

using namespace seqmult;

namespace {

HierarchicalPrior binomial_prior() {
    HierarchicalPrior prior;
    prior.alpha = {0.0};
    prior.psi = SpdMatrix::identity(1);
    prior.psi_p = SpdMatrix::identity(1);
    prior.nu = 5.0;
    prior.nu_p = 5.0;
    return prior;
}

} // namespace

TEST_CASE("sigma conditional with no data is the prior") {
    const HierarchicalPrior prior = default_prior(3);
    RngStream a(31, 0), b(31, 0);
    for (int i = 0; i < 20; ++i) {
        const SpdMatrix cond = sample_sigma_cond(Vector{0.1, -0.2}, {}, prior, a);
        const SpdMatrix direct = sample_inverse_wishart(prior.psi, prior.nu, b);
        CHECK(cond == direct);
    }
}

TEST_CASE("sigma conditional with a zero residual keeps the prior scale") {
    const HierarchicalPrior prior = default_prior(3);
    const Vector mu{0.25, -0.4};
    const std::vector<TransformedObs> data{TransformedObs{mu, 100, kDefaultVstA}};
    RngStream a(32, 0), b(32, 0);
    for (int i = 0; i < 20; ++i) {
        const SpdMatrix cond = sample_sigma_cond(mu, data, prior, a);
        const SpdMatrix direct = sample_inverse_wishart(prior.psi, prior.nu + 1.0, b);
        CHECK(cond == direct);
    }
}

TEST_CASE("scalar sigma conditional has the inverse Wishart mean") {
    HierarchicalPrior prior = binomial_prior();
    const Vector mu{0.3};
    const std::vector<TransformedObs> data{TransformedObs{{0.5}, 10, kDefaultVstA},
                                           TransformedObs{{0.1}, 20, kDefaultVstA}};
    // scale = 1 + 10.5*(0.2)^2 + 20.5*(0.2)^2, dof = 7; mean = scale/(7-2).
    const double scale = 1.0 + 10.5 * 0.04 + 20.5 * 0.04;
    const double expected = scale / 5.0;
    RngStream rng(33, 0);
    double s = 0.0;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) s += sample_sigma_cond(mu, data, prior, rng)(0, 0);
    CHECK(std::fabs(s / reps - expected) < 0.02 * expected);
}

TEST_CASE("sigma_p conditional at mu = alpha and its scalar arithmetic") {
    HierarchicalPrior prior = default_prior(3);
    RngStream a(34, 0), b(34, 0);
    for (int i = 0; i < 20; ++i) {
        const SpdMatrix cond = sample_sigma_p_cond(prior.alpha, prior, a);
        const SpdMatrix direct = sample_inverse_wishart(prior.psi_p, prior.nu_p + 1.0, b);
        CHECK(cond == direct);
    }

    // dim 1, mu - alpha = 2, psi_p = 1: scale 5, dof nu_p + 1 = 6, mean 5/4.
    HierarchicalPrior scalar = binomial_prior();
    RngStream rng(35, 0);
    double s = 0.0;
    const int reps = 200000;
    for (int i = 0; i < reps; ++i) s += sample_sigma_p_cond(Vector{2.0}, scalar, rng)(0, 0);
    CHECK(std::fabs(s / reps - 1.25) < 0.02 * 1.25);

    // The conditional takes no data argument at all: identical streams give
    // identical draws no matter what data exist elsewhere.
    RngStream c1(36, 0), c2(36, 0);
    CHECK(sample_sigma_p_cond(Vector{1.0}, scalar, c1) ==
          sample_sigma_p_cond(Vector{1.0}, scalar, c2));
}

TEST_CASE("mu conditional parameters") {
    SUBCASE("no data reduces to the prior") {
        const HierarchicalPrior prior = default_prior(3);
        Matrix sp(2);
        sp(0, 0) = 2.0; sp(0, 1) = 0.5; sp(1, 0) = 0.5; sp(1, 1) = 1.0;
        const MuCondParams params =
            mu_cond_params(SpdMatrix::identity(2), SpdMatrix(sp), {}, prior);
        CHECK(params.mean[0] == doctest::Approx(prior.alpha[0]).epsilon(1e-12));
        CHECK(params.mean[1] == doctest::Approx(prior.alpha[1]).epsilon(1e-12));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(params.cov(i, j) == doctest::Approx(sp(i, j)).epsilon(1e-10));
    }
    SUBCASE("single unit batch hand computation") {
        // Sigma = Sigma_p = 1, alpha = 0, one batch with n = 1, L = ell:
        // V = 1 + 1.5 = 2.5, mean = 0.6 ell, variance 0.4.
        HierarchicalPrior prior = binomial_prior();
        const double ell = 0.73;
        const MuCondParams params =
            mu_cond_params(SpdMatrix(1.0), SpdMatrix(1.0),
                           {TransformedObs{{ell}, 1, kDefaultVstA}}, prior);
        CHECK(params.mean[0] == doctest::Approx(0.6 * ell));
        CHECK(params.cov(0, 0) == doctest::Approx(0.4));
    }
    SUBCASE("posterior mean approaches the weighted data mean") {
        HierarchicalPrior prior = binomial_prior();
        prior.alpha = {1.3};
        const MuCondParams params =
            mu_cond_params(SpdMatrix(1.0), SpdMatrix(1.0),
                           {TransformedObs{{0.2}, 10000000, kDefaultVstA}}, prior);
        CHECK(params.mean[0] == doctest::Approx(0.2).epsilon(1e-5));
    }
}

TEST_CASE("gelman rubin statistic") {
    SUBCASE("identical nondegenerate chains give sqrt((L-1)/L)") {
        std::vector<double> chain;
        for (int i = 0; i < 100; ++i) chain.push_back(std::sin(0.37 * i));
        const double r = gelman_rubin({chain, chain, chain});
        CHECK(r == doctest::Approx(std::sqrt(99.0 / 100.0)));
    }
    SUBCASE("chains from the same distribution sit near 1") {
        RngStream rng(37, 0);
        std::vector<std::vector<double>> chains(4);
        for (auto& c : chains) {
            c.reserve(10000);
            for (int i = 0; i < 10000; ++i) c.push_back(rng.normal01());
        }
        const double r = gelman_rubin(chains);
        CHECK(r > 0.99);
        CHECK(r < 1.01);
    }
    SUBCASE("separated chains blow up") {
        RngStream rng(38, 0);
        std::vector<std::vector<double>> chains(2);
        for (int i = 0; i < 1000; ++i) {
            chains[0].push_back(rng.normal01());
            chains[1].push_back(100.0 + rng.normal01());
        }
        CHECK(gelman_rubin(chains) > 10.0);
    }
    SUBCASE("degenerate cases") {
        const std::vector<double> flat(20, 1.0);
        CHECK(gelman_rubin({flat, flat}) == 1.0);
        const std::vector<double> other(20, 2.0);
        CHECK(std::isinf(gelman_rubin({flat, other})));
        CHECK_THROWS_AS(gelman_rubin({flat}), ValidationError);
        CHECK_THROWS_AS(gelman_rubin({{1.0, 2.0}, {1.0, 2.0}}), ValidationError);
    }
}

namespace {

BatchSeries make_dgp1_series(const Vector& p, int k, long long n, RngStream& rng) {
    BatchSeries series(static_cast<int>(p.size()));
    for (int j = 0; j < k; ++j) series.add_round(n, sample_multinomial(n, p, rng));
    return series;
}

Vector pooled_mu_mean(const ChainSet& chains, int p) {
    Vector mean(static_cast<std::size_t>(p), 0.0);
    const auto pool = chains.pooled();
    for (const PosteriorDraw& d : pool) mean = mean + d.mu;
    return (1.0 / static_cast<double>(pool.size())) * mean;
}

} // namespace

TEST_CASE("gibbs recovers the transformed truth on clean data") {
    RngStream data_rng(39, 0);
    const Vector p{0.5, 0.3, 0.2};
    const BatchSeries series = make_dgp1_series(p, 25, 1000, data_rng);
    const HierarchicalPrior prior = default_prior(3);
    GibbsConfig config;
    const ChainSet chains = run_gibbs(series, 25, prior, config, RngStream(40, 0));

    const auto pool = chains.pooled();
    CHECK(static_cast<int>(pool.size()) >= config.n_samples);
    const Vector mu_mean = pooled_mu_mean(chains, 2);
    const Vector mu_true = asymptotic_mean(p);
    Vector sd(2, 0.0);
    for (const PosteriorDraw& d : pool)
        for (int i = 0; i < 2; ++i)
            sd[static_cast<std::size_t>(i)] +=
                (d.mu[static_cast<std::size_t>(i)] - mu_mean[static_cast<std::size_t>(i)]) *
                (d.mu[static_cast<std::size_t>(i)] - mu_mean[static_cast<std::size_t>(i)]);
    for (int i = 0; i < 2; ++i) {
        const double s = std::sqrt(sd[static_cast<std::size_t>(i)] / (pool.size() - 1));
        CHECK(std::fabs(mu_mean[static_cast<std::size_t>(i)] -
                        mu_true[static_cast<std::size_t>(i)]) < 3.0 * s);
    }
    // Every returned draw passes the SPD assertion.
    for (const PosteriorDraw& d : pool) {
        CHECK_NOTHROW(cholesky(d.sigma.raw()));
        CHECK_NOTHROW(cholesky(d.sigma_p.raw()));
    }
    // R-hat values at the gate are below the threshold.
    for (double r : chains.rhat_final) CHECK(r < config.gr_threshold);
}

TEST_CASE("gibbs runs are deterministic given the seed") {
    RngStream data_rng(41, 0);
    const BatchSeries series = make_dgp1_series(Vector{0.6, 0.4}, 5, 200, data_rng);
    const HierarchicalPrior prior = default_prior(2);
    GibbsConfig config;
    config.n_samples = 400;
    const ChainSet a = run_gibbs(series, 5, prior, config, RngStream(7, 5));
    const ChainSet b = run_gibbs(series, 5, prior, config, RngStream(7, 5));
    REQUIRE(a.chains.size() == b.chains.size());
    CHECK(a.convergence_iteration == b.convergence_iteration);
    for (std::size_t c = 0; c < a.chains.size(); ++c) {
        REQUIRE(a.chains[c].size() == b.chains[c].size());
        for (std::size_t i = 0; i < a.chains[c].size(); ++i) {
            CHECK(a.chains[c][i].mu == b.chains[c][i].mu);
            CHECK(a.chains[c][i].sigma == b.chains[c][i].sigma);
            CHECK(a.chains[c][i].sigma_p == b.chains[c][i].sigma_p);
        }
    }
}

TEST_CASE("permuting the batches leaves the posterior distribution unchanged") {
    RngStream data_rng(42, 0);
    const BatchSeries series = make_dgp1_series(Vector{0.55, 0.45}, 12, 400, data_rng);
    std::vector<int> order{11, 3, 7, 0, 9, 1, 10, 5, 2, 8, 4, 6};
    const BatchSeries shuffled = series.permuted(order);

    const HierarchicalPrior prior = default_prior(2);
    GibbsConfig config;
    config.n_samples = 4000;
    const ChainSet a = run_gibbs(series, 12, prior, config, RngStream(43, 0));
    const ChainSet b = run_gibbs(shuffled, 12, prior, config, RngStream(44, 0));

    std::vector<double> mu_a, mu_b;
    for (const PosteriorDraw& d : a.pooled()) mu_a.push_back(d.mu[0]);
    for (const PosteriorDraw& d : b.pooled()) mu_b.push_back(d.mu[0]);
    const double se =
        std::sqrt(testutil::se_mean(mu_a) * testutil::se_mean(mu_a) +
                  testutil::se_mean(mu_b) * testutil::se_mean(mu_b));
    CHECK(std::fabs(testutil::mean(mu_a) - testutil::mean(mu_b)) < 3.0 * se);
}

TEST_CASE("non-convergence raises a diagnostic error carrying R-hat values") {
    RngStream data_rng(45, 0);
    const BatchSeries series = make_dgp1_series(Vector{0.5, 0.5}, 3, 100, data_rng);
    const HierarchicalPrior prior = default_prior(2);
    GibbsConfig config;
    config.burn_in = 0;
    config.check_interval = 100;
    config.max_iters = 250;
    config.gr_threshold = 1.0 + 1e-12; // unreachable in a few hundred sweeps
    try {
        run_gibbs(series, 3, prior, config, RngStream(46, 0));
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK_FALSE(e.rhat.empty());
        CHECK(std::string(e.what()).find("did not converge") != std::string::npos);
    }
}

TEST_CASE("prior and config validation") {
    HierarchicalPrior prior = default_prior(3);
    prior.nu = 0.5; // C-2 = 1 needed
    CHECK_THROWS_AS(prior.validate(), ValidationError);

    GibbsConfig config;
    config.n_chains = 1;
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config = GibbsConfig{};
    config.gr_threshold = 1.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
}
