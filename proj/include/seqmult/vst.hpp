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

#ifndef SEQMULT_VST_HPP
#define SEQMULT_VST_HPP

#include <vector>

#include "seqmult/batch.hpp"
#include "seqmult/linalg.hpp"

namespace seqmult {

// The modified arcsine variance-stabilizing transform
//
//   L_c = asin((2 * X_c/n - 1) / (1 + 2a/n)),   c = 1..C-1,
//
// its inverse, and the closed-form limiting moment formulas.

constexpr double kDefaultVstA = 0.375;

// One transformed batch: C-1 coordinates in radians, each in [-pi/2, pi/2].
struct TransformedObs {
    Vector L;
    long long n = 0;
    double a = kDefaultVstA;
};

TransformedObs transform(const std::vector<long long>& counts, long long n,
                         double a = kDefaultVstA);
TransformedObs transform(const Round& round, double a = kDefaultVstA);

// Full C-length probability vector.  Coordinates are clamped to [0, 1] and the
// vector is renormalized only when clamping shifted mass off the simplex.
Vector inverse_transform(const TransformedObs& obs);

// mu_c = asin(2 p_c - 1) for c = 1..C-1; `p` is the full simplex vector.
Vector asymptotic_mean(const Vector& p);

// Limiting correlation matrix of the transformed statistic in the iid case:
// unit diagonal, off-diagonals -sqrt(p_c p_c' / ((1-p_c)(1-p_c'))).
SpdMatrix limiting_corr_iid(const Vector& p);

// The (C-1)x(C-1) multinomial covariance block: p_c(1-p_c) on the diagonal,
// -p_c p_c' off it.
SpdMatrix multinomial_cov_iid(const Vector& p);

struct MomentResult {
    Vector mean;  // length C
    Matrix cov;   // C x C
};

// Unconditional moments of one batch of counts: mean n*p and covariance
// n * multinomial block + n(n-1) * Cov(eps), with the (C-1)-dim perturbation
// covariance extended to the last category via eps_C = -sum(eps_c).
MomentResult unconditional_moments(const Vector& p, long long n, const SpdMatrix& eps_cov);

// Cumulative moments over a list of rounds (round i contributes batch size
// ns[i] and perturbation covariance eps_covs[i]).
MomentResult cumulative_moments(const Vector& p, const std::vector<long long>& ns,
                                const std::vector<SpdMatrix>& eps_covs);

// Extends a (C-1)-dim perturbation covariance to the full C categories.
Matrix extend_eps_cov(const SpdMatrix& eps_cov);

} // namespace seqmult

#endif // SEQMULT_VST_HPP
