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

#ifndef SEQMULT_BATCH_HPP
#define SEQMULT_BATCH_HPP

#include <vector>

#include "seqmult/errors.hpp"

namespace seqmult {

struct Round {
    long long n = 0;
    std::vector<long long> counts;
};

// Ordered per-round count vectors with a derived cumulative view.  Every
// round's counts must sum exactly to its trial count.
class BatchSeries {
public:
    explicit BatchSeries(int categories);

    int categories() const { return categories_; }
    int rounds() const { return static_cast<int>(rounds_.size()); }

    // Validates sum(counts) == n and matching category count.
    void add_round(long long n, std::vector<long long> counts);

    const Round& round(int j) const { return rounds_[static_cast<std::size_t>(j)]; }

    // Y_j: cumulative counts through round `upto` (1-based; 0 gives zeros).
    std::vector<long long> cumulative(int upto) const;
    // N_j: cumulative trials through round `upto`.
    long long cumulative_trials(int upto) const;
    long long total_trials() const { return cumulative_trials(rounds()); }

    BatchSeries prefix(int upto) const;
    // Reordered copy; `order` is a permutation of 0..rounds()-1.
    BatchSeries permuted(const std::vector<int>& order) const;

    bool operator==(const BatchSeries& o) const {
        if (categories_ != o.categories_ || rounds_.size() != o.rounds_.size()) return false;
        for (std::size_t i = 0; i < rounds_.size(); ++i)
            if (rounds_[i].n != o.rounds_[i].n || rounds_[i].counts != o.rounds_[i].counts)
                return false;
        return true;
    }

private:
    int categories_;
    std::vector<Round> rounds_;
};

} // namespace seqmult

#endif // SEQMULT_BATCH_HPP
