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

#include "seqmult/decisions.hpp"
#include "seqmult/simlab.hpp"

using namespace seqmult;

namespace {

PredictiveDraw mk(std::vector<long long> y) {
    PredictiveDraw d;
    d.y_final = std::move(y);
    return d;
}

// Draws where category 0 wins `wins` times out of `total`, margin fixed.
std::vector<PredictiveDraw> synthetic_draws(int total, int wins, long long margin) {
    std::vector<PredictiveDraw> draws;
    draws.reserve(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) {
        if (i < wins)
            draws.push_back(mk({1000 + margin, 1000, 500}));
        else
            draws.push_back(mk({1000, 1000 + margin, 500}));
    }
    return draws;
}

} // namespace

TEST_CASE("decide_election gate order") {
    const ElectionPolicy policy; // 0.5 floor, 0.995 confidence, 5% margin
    SUBCASE("too early regardless of certainty") {
        const auto draws = synthetic_draws(1000, 1000, 500);
        const DecisionOutcome o = decide_election(draws, 0.3, 10000, policy);
        CHECK(o.verdict == Verdict::TooEarly);
        CHECK_FALSE(o.called_category.has_value());
        CHECK(o.winner_prob == 1.0);
    }
    SUBCASE("confident and wide margin calls the race") {
        // margin 600 > 5% of 10000.
        const auto draws = synthetic_draws(1000, 999, 600);
        const DecisionOutcome o = decide_election(draws, 0.6, 10000, policy);
        CHECK(o.verdict == Verdict::Call);
        CHECK(o.called_category == 0);
        CHECK(o.winner_prob >= policy.confidence);
    }
    SUBCASE("confident but thin margin stays too close") {
        // margin 100 = 1% of 10000.
        const auto draws = synthetic_draws(1000, 999, 100);
        const DecisionOutcome o = decide_election(draws, 0.6, 10000, policy);
        CHECK(o.verdict == Verdict::TooClose);
        CHECK_FALSE(o.called_category.has_value());
    }
    SUBCASE("uncertain winner stays too close") {
        const auto draws = synthetic_draws(1000, 700, 600);
        const DecisionOutcome o = decide_election(draws, 0.6, 10000, policy);
        CHECK(o.verdict == Verdict::TooClose);
    }
}

TEST_CASE("raising the confidence can never turn TooClose into Call") {
    RngStream rng(71, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int wins = static_cast<int>(rng.uniform_below(1001));
        const long long margin = static_cast<long long>(rng.uniform_below(2000));
        const auto draws = synthetic_draws(1000, wins, margin);
        ElectionPolicy lo;
        lo.min_counted_frac = 0.0;
        lo.confidence = 0.90;
        ElectionPolicy hi(lo);
        hi.confidence = 0.999;
        const DecisionOutcome olo = decide_election(draws, 0.5, 10000, lo);
        const DecisionOutcome ohi = decide_election(draws, 0.5, 10000, hi);
        if (olo.verdict == Verdict::TooClose) CHECK(ohi.verdict == Verdict::TooClose);
    }
}

TEST_CASE("zero floors reduce the rule to a pure probability threshold") {
    ElectionPolicy policy;
    policy.min_counted_frac = 0.0;
    policy.margin_frac_of_remaining = 0.0;
    const auto confident = synthetic_draws(1000, 996, 1);
    CHECK(decide_election(confident, 0.01, 100000, policy).verdict == Verdict::Call);
    const auto uncertain = synthetic_draws(1000, 994, 1);
    CHECK(decide_election(uncertain, 0.01, 100000, policy).verdict == Verdict::TooClose);
}

TEST_CASE("decide_share") {
    SharePolicy policy; // 5 rounds, 99.5%, +-0.5%
    SUBCASE("too early before min_rounds") {
        const auto draws = synthetic_draws(100, 100, 10);
        const DecisionOutcome o = decide_share(draws, 0, 3, policy);
        CHECK(o.verdict == Verdict::TooEarly);
    }
    SUBCASE("degenerate draws have zero half-width and call") {
        std::vector<PredictiveDraw> draws(50, mk({800, 150, 50}));
        const DecisionOutcome o = decide_share(draws, 0, 10, policy);
        CHECK(o.verdict == Verdict::Call);
        CHECK(o.called_category == 0);
        CHECK(*o.share_estimate == doctest::Approx(0.8));
    }
    SUBCASE("wide interval rejects the call") {
        // Spread shares roughly between 0.80 and 0.83: half-width ~1.5%.
        std::vector<PredictiveDraw> draws;
        for (int i = 0; i < 400; ++i)
            draws.push_back(mk({800 + (i % 31), 200 - (i % 31), 0}));
        const DecisionOutcome o = decide_share(draws, 0, 10, policy);
        CHECK(o.verdict == Verdict::TooClose);
        CHECK(0.5 * (o.share_interval->hi - o.share_interval->lo) > policy.margin_of_error);
    }
}

TEST_CASE("collation pools everything but the two current leaders") {
    BatchSeries series(5);
    series.add_round(100, {10, 40, 5, 30, 15});
    series.add_round(100, {10, 35, 10, 35, 10});
    const CollatedSeries cs = collate_top_two(series, 2);
    CHECK(cs.series.categories() == 3);
    // Cumulative: {20, 75, 15, 65, 25} -> top two are 1 and 3.
    CHECK(cs.category_map == std::vector<int>{1, 3, -1});
    CHECK(cs.series.round(0).counts == std::vector<long long>{40, 30, 30});
    CHECK(cs.series.round(1).counts == std::vector<long long>{35, 35, 30});

    // C = 3 collation is a pure reordering with every category callable.
    BatchSeries three(3);
    three.add_round(10, {2, 5, 3});
    const CollatedSeries cs3 = collate_top_two(three, 1);
    CHECK(cs3.category_map == std::vector<int>{1, 2, 0});
    CHECK(cs3.series.round(0).counts == std::vector<long long>{5, 3, 2});
}

namespace {

BatchSeries landslide_series(RngStream& rng, int k = 25, long long n = 5000) {
    const Vector p{0.7, 0.2, 0.1};
    BatchSeries series(3);
    for (int j = 0; j < k; ++j) series.add_round(n, sample_multinomial(n, p, rng));
    return series;
}

} // namespace

TEST_CASE("sequential run calls a landslide early and correctly") {
    RngStream data_rng(72, 0);
    const BatchSeries series = landslide_series(data_rng);
    SequentialConfig config;
    config.policy = ElectionPolicy{}; // 50% floor
    config.n_sims = 2000;
    const DecisionTrace trace =
        sequential_run(series, default_prior(3), config, RngStream(73, 0));
    REQUIRE(trace.first_call_round.has_value());
    CHECK(*trace.first_call_category == 0);
    // 50% of 25 equal rounds lapses at round 13; a landslide calls right there.
    CHECK(*trace.first_call_round == 13);
    CHECK(trace.rounds.size() == 25);
    // Call entries always carry winner_prob at or above the policy confidence.
    for (const RoundDecision& rd : trace.rounds)
        if (rd.converged && rd.outcome.verdict == Verdict::Call)
            CHECK(rd.outcome.winner_prob >= 0.995);
}

TEST_CASE("sequential run with the simulation policy calls before the floor") {
    RngStream data_rng(74, 0);
    const BatchSeries series = landslide_series(data_rng);
    SequentialConfig config;
    config.policy = simulation_election_policy();
    config.n_sims = 2000;
    const DecisionTrace trace =
        sequential_run(series, default_prior(3), config, RngStream(75, 0));
    REQUIRE(trace.first_call_round.has_value());
    CHECK(*trace.first_call_category == 0);
    CHECK(*trace.first_call_round < 13);
}

TEST_CASE("single-round series proceeds with observed_frac below any floor") {
    RngStream data_rng(76, 0);
    BatchSeries series(3);
    series.add_round(5000, sample_multinomial(5000, Vector{0.7, 0.2, 0.1}, data_rng));
    SequentialConfig config;
    config.policy = ElectionPolicy{};
    config.n_sims = 1000;
    // Horizon equals the single observed round: everything is counted, the
    // floor is met (observed_frac = 1), so the round is decided on its merits.
    const DecisionTrace trace =
        sequential_run(series, default_prior(3), config, RngStream(77, 0));
    CHECK(trace.rounds.size() == 1);
    CHECK(trace.rounds[0].outcome.verdict != Verdict::TooEarly);
    CHECK(trace.rounds[0].outcome.data_frac_used == 1.0);
}

TEST_CASE("share-mode sequential run respects min_rounds") {
    RngStream data_rng(78, 0);
    const Vector p{0.8, 0.15, 0.05};
    BatchSeries series(3);
    for (int j = 0; j < 8; ++j) series.add_round(2000, sample_multinomial(2000, p, data_rng));
    SequentialConfig config;
    SharePolicy policy;
    policy.category = 0;
    config.policy = policy;
    config.n_sims = 1000;
    const DecisionTrace trace =
        sequential_run(series, default_prior(3), config, RngStream(79, 0));
    for (int j = 0; j < 4; ++j)
        CHECK(trace.rounds[static_cast<std::size_t>(j)].outcome.verdict == Verdict::TooEarly);
    for (const RoundDecision& rd : trace.rounds) {
        CHECK(rd.outcome.share_estimate.has_value());
        if (rd.outcome.verdict == Verdict::Call) CHECK(*rd.outcome.called_category == 0);
    }
}

TEST_CASE("a five-category election fit runs through collation") {
    RngStream data_rng(80, 0);
    const Vector p{0.40, 0.35, 0.10, 0.09, 0.06};
    BatchSeries series(5);
    for (int j = 0; j < 10; ++j) series.add_round(4000, sample_multinomial(4000, p, data_rng));
    SequentialConfig config;
    ElectionPolicy policy;
    policy.min_counted_frac = 0.0;
    config.policy = policy; // collation stays on
    config.n_sims = 1000;
    const DecisionTrace trace =
        sequential_run(series, default_prior(3), config, RngStream(81, 0));
    CHECK(trace.rounds.size() == 10);
    bool saw_call = false;
    for (const RoundDecision& rd : trace.rounds) {
        if (!rd.converged) continue;
        // Leader and any call refer to original category indices (-1 would
        // mean the pooled rest leads, impossible with these probabilities).
        CHECK(rd.outcome.leader == 0);
        if (rd.outcome.called_category) {
            saw_call = true;
            CHECK(*rd.outcome.called_category == 0);
        }
    }
    CHECK(saw_call);
}

TEST_CASE("a leading pooled remainder is never called") {
    // Three mid-size categories pool into a rest that dominates both leaders.
    RngStream data_rng(82, 0);
    const Vector p{0.22, 0.20, 0.20, 0.19, 0.19};
    BatchSeries series(5);
    for (int j = 0; j < 6; ++j) series.add_round(5000, sample_multinomial(5000, p, data_rng));
    SequentialConfig config;
    ElectionPolicy policy;
    policy.min_counted_frac = 0.0;
    config.policy = policy;
    config.n_sims = 1000;
    const DecisionTrace trace =
        sequential_run(series, default_prior(3), config, RngStream(83, 0));
    for (const RoundDecision& rd : trace.rounds) {
        if (!rd.converged) continue;
        CHECK(rd.outcome.verdict != Verdict::Call);
        CHECK(rd.outcome.leader == -1);
    }
    CHECK_FALSE(trace.first_call_round.has_value());
}

TEST_CASE("policy validation") {
    ElectionPolicy bad;
    bad.confidence = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    SharePolicy bad2;
    bad2.margin_of_error = 0.0;
    CHECK_THROWS_AS(bad2.validate(), ValidationError);
}
