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

#include "seqmult/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace seqmult {

FutureSchedule FutureSchedule::known(std::vector<long long> sizes) {
    for (long long s : sizes)
        if (s < 1) throw ValidationError("future schedule sizes must be positive");
    FutureSchedule out;
    out.sizes = std::move(sizes);
    out.source = Source::known;
    return out;
}

FutureSchedule FutureSchedule::from_series(const BatchSeries& series, int upto, int horizon) {
    if (horizon > series.rounds())
        throw ValidationError("future schedule horizon exceeds the series length");
    std::vector<long long> sizes;
    for (int j = upto; j < horizon; ++j) sizes.push_back(series.round(j).n);
    FutureSchedule out;
    out.sizes = std::move(sizes);
    out.source = Source::known;
    return out;
}

FutureSchedule FutureSchedule::average_of_observed(const BatchSeries& series, int upto,
                                                   int horizon) {
    if (upto < 1) throw ValidationError("average-of-observed schedule needs observed rounds");
    FutureSchedule out;
    out.source = Source::average_of_observed;
    const int remaining = horizon - upto;
    if (remaining <= 0) return out;
    const double avg =
        static_cast<double>(series.cumulative_trials(upto)) / static_cast<double>(upto);
    const long long per_round = std::max<long long>(1, std::llround(avg));
    const long long total = std::max<long long>(1, std::llround(avg * remaining));
    out.sizes.assign(static_cast<std::size_t>(remaining), per_round);
    // Rounding remainder lands on the last round.
    out.sizes.back() = std::max<long long>(1, total - per_round * (remaining - 1));
    return out;
}

PredictiveMoments predictive_moments(const ChainSet& chains, long long n_l) {
    const std::vector<PosteriorDraw> pool = chains.pooled();
    if (pool.empty()) throw ValidationError("predictive_moments: empty chain set");
    const int p = static_cast<int>(pool.front().mu.size());
    const double m = static_cast<double>(pool.size());

    Vector mu_bar(static_cast<std::size_t>(p), 0.0);
    Matrix sigma_bar(p);
    for (const PosteriorDraw& d : pool) {
        mu_bar = mu_bar + d.mu;
        sigma_bar += d.sigma.raw();
    }
    mu_bar = (1.0 / m) * mu_bar;
    sigma_bar *= 1.0 / m;

    Matrix mu_disp(p);
    if (pool.size() > 1) {
        for (const PosteriorDraw& d : pool) {
            const Vector r = d.mu - mu_bar;
            mu_disp += outer(r, r);
        }
        mu_disp *= 1.0 / (m - 1.0);
    }

    PredictiveMoments out;
    out.mean = mu_bar;
    out.cov = (1.0 / (static_cast<double>(n_l) + 0.5)) * sigma_bar + mu_disp;
    return out;
}

std::vector<PredictiveDraw> simulate_future(const ChainSet& chains, const BatchSeries& observed,
                                            int upto, const FutureSchedule& schedule, int n_sims,
                                            RngStream rng, bool keep_path, double vst_a) {
    if (n_sims < 1) throw ValidationError("simulate_future: n_sims must be >= 1");
    const std::vector<PosteriorDraw> pool = chains.pooled();
    if (pool.empty()) throw ValidationError("simulate_future: empty chain set");
    const std::vector<long long> y_observed = observed.cumulative(upto);
    const std::size_t n_future = schedule.sizes.size();

    // Factor each pooled Sigma once per future size class is overkill; the
    // per-draw factorization below is cheap at these dimensions.
    std::vector<PredictiveDraw> draws(static_cast<std::size_t>(n_sims));
    for (int s = 0; s < n_sims; ++s) {
        RngStream sim_rng = rng.derive(static_cast<std::uint64_t>(s));
        const PosteriorDraw& par =
            pool[static_cast<std::size_t>(sim_rng.uniform_below(pool.size()))];
        const Matrix sigma_chol = cholesky(par.sigma.raw(), "posterior Sigma draw");

        PredictiveDraw& d = draws[static_cast<std::size_t>(s)];
        std::vector<long long> y(y_observed);
        if (keep_path) {
            d.p_draw.reserve(n_future);
            d.counts.reserve(n_future);
        }
        for (std::size_t l = 0; l < n_future; ++l) {
            const long long n_l = schedule.sizes[l];
            const double scale = 1.0 / std::sqrt(static_cast<double>(n_l) + 0.5);
            Vector z(par.mu.size());
            for (double& zi : z) zi = sim_rng.normal01();
            Vector ell(par.mu);
            const int p = static_cast<int>(par.mu.size());
            for (int i = 0; i < p; ++i) {
                double acc = 0.0;
                for (int j = 0; j <= i; ++j) acc += sigma_chol(i, j) * z[static_cast<std::size_t>(j)];
                ell[static_cast<std::size_t>(i)] += scale * acc;
            }
            // The transform image is [-pi/2, pi/2]; predictive draws outside
            // are clamped so the inverse stays total.
            for (double& v : ell) v = std::clamp(v, -1.5707963267948966, 1.5707963267948966);
            const Vector prob = inverse_transform(TransformedObs{ell, n_l, vst_a});
            const std::vector<long long> x = sample_multinomial(n_l, prob, sim_rng);
            for (std::size_t c = 0; c < y.size(); ++c) y[c] += x[c];
            if (keep_path) {
                d.p_draw.push_back(prob);
                d.counts.push_back(x);
            }
        }
        d.y_final = std::move(y);
    }
    return draws;
}

Vector winner_probability(const std::vector<PredictiveDraw>& draws) {
    if (draws.empty()) throw ValidationError("winner_probability: no draws");
    const std::size_t c = draws.front().y_final.size();
    Vector prob(c, 0.0);
    for (const PredictiveDraw& d : draws) {
        long long best = d.y_final[0];
        for (long long v : d.y_final) best = std::max(best, v);
        int ties = 0;
        for (long long v : d.y_final)
            if (v == best) ++ties;
        const double share = 1.0 / static_cast<double>(ties);
        for (std::size_t i = 0; i < c; ++i)
            if (d.y_final[i] == best) prob[i] += share;
    }
    for (double& v : prob) v /= static_cast<double>(draws.size());
    return prob;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - std::floor(h);
    return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

DistributionSummary summarize(std::vector<double> values, double level) {
    DistributionSummary out;
    out.level = level;
    double s = 0.0;
    for (double v : values) s += v;
    out.mean = s / static_cast<double>(values.size());
    const double tail = 0.5 * (1.0 - level);
    out.lo = quantile(values, tail);
    out.hi = quantile(std::move(values), 1.0 - tail);
    return out;
}

} // namespace

DistributionSummary victory_margin(const std::vector<PredictiveDraw>& draws, double level) {
    if (draws.empty()) throw ValidationError("victory_margin: no draws");
    if (draws.front().y_final.size() < 2)
        throw ValidationError("victory_margin needs at least 2 categories");
    std::vector<double> margins;
    margins.reserve(draws.size());
    for (const PredictiveDraw& d : draws) {
        long long top = d.y_final[0], second = d.y_final[1];
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
        margins.push_back(static_cast<double>(top - second));
    }
    return summarize(std::move(margins), level);
}

DistributionSummary share_distribution(const std::vector<PredictiveDraw>& draws, int category,
                                       double level) {
    if (draws.empty()) throw ValidationError("share_distribution: no draws");
    if (category < 0 || category >= static_cast<int>(draws.front().y_final.size()))
        throw ValidationError("share_distribution: category index out of range");
    std::vector<double> shares;
    shares.reserve(draws.size());
    for (const PredictiveDraw& d : draws) {
        long long total = 0;
        for (long long v : d.y_final) total += v;
        shares.push_back(static_cast<double>(d.y_final[static_cast<std::size_t>(category)]) /
                         static_cast<double>(total));
    }
    return summarize(std::move(shares), level);
}

double target_share_probability(const std::vector<PredictiveDraw>& draws, int category,
                                double pi0) {
    if (draws.empty()) throw ValidationError("target_share_probability: no draws");
    if (category < 0 || category >= static_cast<int>(draws.front().y_final.size()))
        throw ValidationError("target_share_probability: category index out of range");
    long long hits = 0;
    for (const PredictiveDraw& d : draws) {
        long long total = 0;
        for (long long v : d.y_final) total += v;
        if (static_cast<double>(d.y_final[static_cast<std::size_t>(category)]) >=
            pi0 * static_cast<double>(total))
            ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(draws.size());
}

} // namespace seqmult
