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

#ifndef SEQMULT_FORECAST_HPP
#define SEQMULT_FORECAST_HPP

#include <vector>

#include "seqmult/batch.hpp"
#include "seqmult/model.hpp"

namespace seqmult {

// Sizes of the rounds still to come.  When future sizes are unknown they are
// taken at the average of the observed rounds, rounded, with the rounding
// remainder folded into the last round.
struct FutureSchedule {
    enum class Source { known, average_of_observed };

    std::vector<long long> sizes;
    Source source = Source::average_of_observed;

    static FutureSchedule known(std::vector<long long> sizes);
    // Sizes of rounds upto+1..horizon taken from the series itself.
    static FutureSchedule from_series(const BatchSeries& series, int upto, int horizon);
    static FutureSchedule average_of_observed(const BatchSeries& series, int upto, int horizon);

    long long total() const {
        long long t = 0;
        for (long long s : sizes) t += s;
        return t;
    }
};

// One simulated future trajectory: per-round cell probabilities and counts,
// plus the cumulative count vector at the horizon.
struct PredictiveDraw {
    std::vector<Vector> p_draw;
    std::vector<std::vector<long long>> counts;
    std::vector<long long> y_final;
};

struct PredictiveMoments {
    Vector mean;
    Matrix cov;
};

// Moment-matched normal approximation of the posterior predictive for a
// future round of size n_l: mean is the average of the mu draws, covariance
// is (average Sigma)/(n_l + 0.5) plus the sample covariance of the mu draws.
PredictiveMoments predictive_moments(const ChainSet& chains, long long n_l);

// Hierarchical posterior-predictive simulation: per simulation draw one
// (mu, Sigma) pair uniformly from the pooled posterior sample, then roll the
// future rounds forward:
//   L_l ~ N(mu, Sigma/(n_l + 0.5)),  p_l = inverse transform,  X_l ~ Mult(n_l, p_l).
// With keep_path false only y_final is stored.
std::vector<PredictiveDraw> simulate_future(const ChainSet& chains, const BatchSeries& observed,
                                            int upto, const FutureSchedule& schedule, int n_sims,
                                            RngStream rng, bool keep_path = true,
                                            double vst_a = kDefaultVstA);

// Fraction of draws in which each category attains the maximum of y_final;
// exact ties split their weight equally.
Vector winner_probability(const std::vector<PredictiveDraw>& draws);

struct DistributionSummary {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0; // central coverage of [lo, hi]
};

// Distribution of the victory margin Y^(1) - Y^(2) at the horizon.
DistributionSummary victory_margin(const std::vector<PredictiveDraw>& draws, double level = 0.99);

// Distribution of y_final[category] / total at the horizon.
DistributionSummary share_distribution(const std::vector<PredictiveDraw>& draws, int category,
                                       double level = 0.995);

// Fraction of draws with y_final[category] >= pi0 * total.
double target_share_probability(const std::vector<PredictiveDraw>& draws, int category,
                                double pi0);

// Central-quantile helper shared with the decision rules (linear
// interpolation between order statistics).
double quantile(std::vector<double> values, double q);

} // namespace seqmult

#endif // SEQMULT_FORECAST_HPP
