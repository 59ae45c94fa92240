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

#ifndef SEQMULT_DECISIONS_HPP
#define SEQMULT_DECISIONS_HPP

#include <optional>
#include <variant>
#include <vector>

#include "seqmult/forecast.hpp"
#include "seqmult/model.hpp"

namespace seqmult {

enum class Verdict { TooEarly, TooClose, Call };

const char* to_string(Verdict v);

enum class MarginSummaryKind { mean, median, lower_quantile };

// Race-calling rule: call once at least min_counted_frac of the trials are
// observed, the leader's win probability reaches `confidence`, and the
// predicted margin (conditional on that leader winning) exceeds
// margin_frac_of_remaining of the remaining trials.
struct ElectionPolicy {
    double min_counted_frac = 0.50;
    double confidence = 0.995;
    double margin_frac_of_remaining = 0.05;
    MarginSummaryKind margin_summary = MarginSummaryKind::mean;
    double lower_quantile = 0.05; // used when margin_summary == lower_quantile
    // Pool everything but the two current leaders into a third category
    // before fitting (recomputed every round).
    bool collate_top_two = true;

    void validate() const;
};

// Simulation-style variant of the election rule: no counting floor, no
// collation.
ElectionPolicy simulation_election_policy();

// Share-calling rule: call once the central `confidence` interval of the
// predicted final share has half-width at most margin_of_error, after at
// least min_rounds rounds.
struct SharePolicy {
    int min_rounds = 5;
    double confidence = 0.995;
    double margin_of_error = 0.005;
    int category = 0;

    void validate() const;
};

struct DecisionOutcome {
    Verdict verdict = Verdict::TooEarly;
    std::optional<int> called_category; // present iff verdict == Call
    double winner_prob = 0.0;           // leader's win probability
    // Category with the highest win probability; -1 when the collated "rest"
    // pool leads (a pool is never a callable category).
    int leader = -1;
    DistributionSummary predicted_margin;
    double data_frac_used = 0.0;
    // Share mode only.
    std::optional<double> share_estimate;
    std::optional<DistributionSummary> share_interval;
};

DecisionOutcome decide_election(const std::vector<PredictiveDraw>& draws, double observed_frac,
                                long long remaining_total, const ElectionPolicy& policy);

DecisionOutcome decide_share(const std::vector<PredictiveDraw>& draws, int category,
                             int rounds_used, const SharePolicy& policy);

// Top-two-plus-rest collation.  category_map[k] is the original index of
// collated category k, or -1 for the pooled remainder.
struct CollatedSeries {
    BatchSeries series;
    std::vector<int> category_map;
};
CollatedSeries collate_top_two(const BatchSeries& series, int upto);

struct SequentialConfig {
    GibbsConfig gibbs;
    std::variant<ElectionPolicy, SharePolicy> policy = ElectionPolicy{};
    int n_sims = 4000;
    // Horizon (total number of rounds) the forecast runs to; -1 means the
    // series length.
    int horizon = -1;
    FutureSchedule::Source schedule_source = FutureSchedule::Source::average_of_observed;

    bool is_election() const { return std::holds_alternative<ElectionPolicy>(policy); }
};

struct RoundDecision {
    int round = 0; // 1-based
    bool converged = true;
    DecisionOutcome outcome;
    std::vector<double> rhat;
};

struct DecisionTrace {
    std::vector<RoundDecision> rounds;
    std::optional<int> first_call_round;
    std::optional<int> first_call_category; // in original category indices
};

// Fits, forecasts and applies the policy after every round 1..upto.  The
// trace keeps going after the first Call for audit; the first Call is the
// reported decision.  A non-convergent round is recorded and skipped.
DecisionTrace sequential_run(const BatchSeries& series, const HierarchicalPrior& prior,
                             const SequentialConfig& config, const RngStream& rng,
                             int upto = -1);

} // namespace seqmult

#endif // SEQMULT_DECISIONS_HPP
