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

#include "seqmult/batch.hpp"

#include <numeric>
#include <string>

namespace seqmult {

BatchSeries::BatchSeries(int categories) : categories_(categories) {
    if (categories < 2) throw ValidationError("a batch series needs at least 2 categories");
}

void BatchSeries::add_round(long long n, std::vector<long long> counts) {
    if (n < 1) throw ValidationError("round " + std::to_string(rounds() + 1) +
                                     ": trial count must be positive");
    if (static_cast<int>(counts.size()) != categories_)
        throw ValidationError("round " + std::to_string(rounds() + 1) +
                              ": expected " + std::to_string(categories_) + " categories, got " +
                              std::to_string(counts.size()));
    long long total = 0;
    for (long long c : counts) {
        if (c < 0)
            throw ValidationError("round " + std::to_string(rounds() + 1) + ": negative count");
        total += c;
    }
    if (total != n)
        throw ValidationError("round " + std::to_string(rounds() + 1) + ": counts sum to " +
                              std::to_string(total) + " but n is " + std::to_string(n));
    rounds_.push_back(Round{n, std::move(counts)});
}

std::vector<long long> BatchSeries::cumulative(int upto) const {
    std::vector<long long> y(static_cast<std::size_t>(categories_), 0);
    for (int j = 0; j < upto; ++j)
        for (int c = 0; c < categories_; ++c)
            y[static_cast<std::size_t>(c)] += rounds_[static_cast<std::size_t>(j)].counts[static_cast<std::size_t>(c)];
    return y;
}

long long BatchSeries::cumulative_trials(int upto) const {
    long long n = 0;
    for (int j = 0; j < upto; ++j) n += rounds_[static_cast<std::size_t>(j)].n;
    return n;
}

BatchSeries BatchSeries::prefix(int upto) const {
    BatchSeries out(categories_);
    for (int j = 0; j < upto; ++j) out.rounds_.push_back(rounds_[static_cast<std::size_t>(j)]);
    return out;
}

BatchSeries BatchSeries::permuted(const std::vector<int>& order) const {
    if (static_cast<int>(order.size()) != rounds())
        throw ValidationError("permutation length must equal the number of rounds");
    BatchSeries out(categories_);
    std::vector<bool> seen(order.size(), false);
    for (int idx : order) {
        if (idx < 0 || idx >= rounds() || seen[static_cast<std::size_t>(idx)])
            throw ValidationError("invalid round permutation");
        seen[static_cast<std::size_t>(idx)] = true;
        out.rounds_.push_back(rounds_[static_cast<std::size_t>(idx)]);
    }
    return out;
}

} // namespace seqmult
