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

#include "seqmult/decisions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqmult {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::TooEarly: return "too_early";
        case Verdict::TooClose: return "too_close";
        case Verdict::Call: return "call";
    }
    return "unknown";
}

void ElectionPolicy::validate() const {
    if (min_counted_frac < 0.0 || min_counted_frac >= 1.0)
        throw ValidationError("election policy: min_counted_frac must be in [0, 1)");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ValidationError("election policy: confidence must be in (0, 1)");
    if (margin_frac_of_remaining < 0.0 || margin_frac_of_remaining >= 1.0)
        throw ValidationError("election policy: margin_frac_of_remaining must be in [0, 1)");
}

ElectionPolicy simulation_election_policy() {
    ElectionPolicy p;
    p.min_counted_frac = 0.0;
    p.collate_top_two = false;
    return p;
}

void SharePolicy::validate() const {
    if (min_rounds < 0) throw ValidationError("share policy: min_rounds must be nonnegative");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ValidationError("share policy: confidence must be in (0, 1)");
    if (!(margin_of_error > 0.0))
        throw ValidationError("share policy: margin_of_error must be positive");
}

namespace {

// Margin sample restricted to draws where `category` attains the maximum.
std::vector<double> conditional_margins(const std::vector<PredictiveDraw>& draws, int category) {
    std::vector<double> margins;
    for (const PredictiveDraw& d : draws) {
        long long top = d.y_final[0], second = (d.y_final.size() > 1) ? d.y_final[1] : 0;
        if (second > top) std::swap(top, second);
        for (std::size_t i = 2; i < d.y_final.size(); ++i) {
            const long long v = d.y_final[i];
            if (v > top) {
                second = top;
                top = v;
            } else if (v > second) {
                second = v;
            }
        }
        if (d.y_final[static_cast<std::size_t>(category)] == top)
            margins.push_back(static_cast<double>(top - second));
    }
    return margins;
}

double summarize_margin(std::vector<double> margins, const ElectionPolicy& policy) {
    if (margins.empty()) return 0.0;
    switch (policy.margin_summary) {
        case MarginSummaryKind::mean:
            return std::accumulate(margins.begin(), margins.end(), 0.0) /
                   static_cast<double>(margins.size());
        case MarginSummaryKind::median: return quantile(std::move(margins), 0.5);
        case MarginSummaryKind::lower_quantile:
            return quantile(std::move(margins), policy.lower_quantile);
    }
    return 0.0;
}

} // namespace

DecisionOutcome decide_election(const std::vector<PredictiveDraw>& draws, double observed_frac,
                                long long remaining_total, const ElectionPolicy& policy) {
    policy.validate();
    if (draws.empty()) throw ValidationError("decide_election: no predictive draws");
    if (observed_frac < 0.0 || observed_frac > 1.0)
        throw ValidationError("decide_election: observed_frac must be in [0, 1]");

    const Vector win_prob = winner_probability(draws);
    DecisionOutcome out;
    out.leader = static_cast<int>(std::max_element(win_prob.begin(), win_prob.end()) -
                                  win_prob.begin());
    out.winner_prob = win_prob[static_cast<std::size_t>(out.leader)];
    out.predicted_margin = victory_margin(draws);
    out.data_frac_used = observed_frac;

    if (observed_frac < policy.min_counted_frac) {
        out.verdict = Verdict::TooEarly;
        return out;
    }
    const double margin_stat =
        summarize_margin(conditional_margins(draws, out.leader), policy);
    const bool confident = out.winner_prob >= policy.confidence;
    const bool wide_enough =
        margin_stat > policy.margin_frac_of_remaining * static_cast<double>(remaining_total);
    if (confident && wide_enough) {
        out.verdict = Verdict::Call;
        out.called_category = out.leader;
    } else {
        out.verdict = Verdict::TooClose;
    }
    return out;
}

DecisionOutcome decide_share(const std::vector<PredictiveDraw>& draws, int category,
                             int rounds_used, const SharePolicy& policy) {
    policy.validate();
    if (draws.empty()) throw ValidationError("decide_share: no predictive draws");

    const DistributionSummary share = share_distribution(draws, category, policy.confidence);
    DecisionOutcome out;
    out.leader = category;
    out.share_estimate = share.mean;
    out.share_interval = share;
    out.predicted_margin = victory_margin(draws);
    const Vector win_prob = winner_probability(draws);
    out.winner_prob = win_prob[static_cast<std::size_t>(category)];

    if (rounds_used < policy.min_rounds) {
        out.verdict = Verdict::TooEarly;
        return out;
    }
    const double half_width = 0.5 * (share.hi - share.lo);
    if (half_width <= policy.margin_of_error) {
        out.verdict = Verdict::Call;
        out.called_category = category;
    } else {
        out.verdict = Verdict::TooClose; // interval too wide
    }
    return out;
}

CollatedSeries collate_top_two(const BatchSeries& series, int upto) {
    if (upto < 1 || upto > series.rounds())
        throw ValidationError("collate_top_two: round prefix out of range");
    const int c = series.categories();
    CollatedSeries out{BatchSeries(std::max(2, std::min(c, 3))), {}};
    if (c <= 2) {
        out.series = series.prefix(upto);
        out.category_map = {0, 1};
        return out;
    }
    const std::vector<long long> y = series.cumulative(upto);
    std::vector<int> order(static_cast<std::size_t>(c));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return y[static_cast<std::size_t>(a)] > y[static_cast<std::size_t>(b)];
    });
    const int top1 = order[0], top2 = order[1];
    out.category_map = {top1, top2, c == 3 ? order[2] : -1};
    BatchSeries collated(3);
    for (int j = 0; j < upto; ++j) {
        const Round& r = series.round(j);
        long long rest = 0;
        for (int k = 0; k < c; ++k)
            if (k != top1 && k != top2) rest += r.counts[static_cast<std::size_t>(k)];
        collated.add_round(r.n, {r.counts[static_cast<std::size_t>(top1)],
                                 r.counts[static_cast<std::size_t>(top2)], rest});
    }
    out.series = std::move(collated);
    return out;
}

DecisionTrace sequential_run(const BatchSeries& series, const HierarchicalPrior& prior,
                             const SequentialConfig& config, const RngStream& rng, int upto) {
    if (series.rounds() < 1) throw ValidationError("sequential_run: empty series");
    const int k = series.rounds();
    if (upto < 0) upto = k;
    if (upto < 1 || upto > k) throw ValidationError("sequential_run: round prefix out of range");
    const int horizon = config.horizon < 0 ? k : config.horizon;
    if (horizon < upto) throw ValidationError("sequential_run: horizon precedes the data prefix");
    if (config.schedule_source == FutureSchedule::Source::known && horizon > k)
        throw ValidationError("sequential_run: known schedule needs sizes through the horizon");

    const bool collate = config.is_election() && std::get<ElectionPolicy>(config.policy).collate_top_two;

    DecisionTrace trace;
    for (int j = 1; j <= upto; ++j) {
        const RngStream round_rng = rng.derive(static_cast<std::uint64_t>(j));
        RoundDecision rd;
        rd.round = j;

        std::vector<int> category_map;
        BatchSeries fit_series(2);
        if (collate) {
            CollatedSeries cs = collate_top_two(series, j);
            category_map = std::move(cs.category_map);
            fit_series = std::move(cs.series);
        } else {
            fit_series = series.prefix(j);
        }

        ChainSet chains;
        try {
            chains = run_gibbs(fit_series, j, prior, config.gibbs, round_rng.derive(0));
        } catch (const ConvergenceError& e) {
            rd.converged = false;
            rd.rhat = e.rhat;
            trace.rounds.push_back(std::move(rd));
            continue;
        }
        rd.rhat = chains.rhat_final;

        const FutureSchedule schedule =
            config.schedule_source == FutureSchedule::Source::known
                ? FutureSchedule::from_series(series, j, horizon)
                : FutureSchedule::average_of_observed(series, j, horizon);
        const std::vector<PredictiveDraw> draws =
            simulate_future(chains, fit_series, j, schedule, config.n_sims, round_rng.derive(1),
                            /*keep_path=*/false, config.gibbs.vst_a);

        const long long n_j = series.cumulative_trials(j);
        const long long remaining = schedule.total();
        const double observed_frac =
            static_cast<double>(n_j) / static_cast<double>(n_j + remaining);

        if (config.is_election()) {
            const ElectionPolicy& policy = std::get<ElectionPolicy>(config.policy);
            rd.outcome = decide_election(draws, observed_frac, remaining, policy);
            if (collate) {
                // Map back to the original category indices; a pooled "rest"
                // winner is not a callable category.
                rd.outcome.leader = category_map[static_cast<std::size_t>(rd.outcome.leader)];
                if (rd.outcome.called_category) {
                    const int mapped = category_map[static_cast<std::size_t>(*rd.outcome.called_category)];
                    if (mapped < 0) {
                        rd.outcome.verdict = Verdict::TooClose;
                        rd.outcome.called_category.reset();
                    } else {
                        rd.outcome.called_category = mapped;
                    }
                }
            }
        } else {
            const SharePolicy& policy = std::get<SharePolicy>(config.policy);
            rd.outcome = decide_share(draws, policy.category, j, policy);
        }
        rd.outcome.data_frac_used = observed_frac;

        if (rd.outcome.verdict == Verdict::Call && !trace.first_call_round) {
            trace.first_call_round = j;
            trace.first_call_category = rd.outcome.called_category;
        }
        trace.rounds.push_back(std::move(rd));
    }
    return trace;
}

} // namespace seqmult
