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

#ifndef SEQMULT_STOCHASTICS_HPP
#define SEQMULT_STOCHASTICS_HPP

#include <cstdint>
#include <vector>

#include "seqmult/linalg.hpp"
#include "seqmult/rng.hpp"

namespace seqmult {

// Gamma(shape, scale=1) via Marsaglia-Tsang; shape < 1 handled by boosting.
double sample_gamma(double shape, RngStream& rng);

// Chi-squared with real dof > 0.
double sample_chisq(double dof, RngStream& rng);

// Exact Binomial(n, p) draw.  Inversion for small n*p, BTRS (transformed
// rejection) otherwise, so the cost is O(1) in n.
long long sample_binomial(long long n, double p, RngStream& rng);

// Poisson(lambda): Knuth multiplication for small lambda, PTRS otherwise.
long long sample_poisson(double lambda, RngStream& rng);

// Multivariate normal via Cholesky factor times standard normals plus mean.
// Coordinates whose covariance row is exactly zero are treated as point mass
// at the mean, which supports the noise-free DGP path uniformly.
Vector sample_mvn(const Vector& mean, const SpdMatrix& cov, RngStream& rng);

// Same, with a prefactored lower Cholesky factor (hot loops).
Vector sample_mvn_chol(const Vector& mean, const Matrix& chol_lower, RngStream& rng);

// Inverse Wishart draw via the Bartlett decomposition: S^{-1} ~ Wishart(scale^{-1}, dof).
// Empirical mean of draws converges to scale/(dof - dim - 1) when dof > dim + 1.
SpdMatrix sample_inverse_wishart(const SpdMatrix& scale, double dof, RngStream& rng);

// Dirichlet draw; output is strictly inside the simplex and sums to 1 within 1e-12.
Vector sample_dirichlet(const Vector& concentration, RngStream& rng);

// Multinomial counts summing exactly to n, via conditional binomials.
// `probs` must lie on the simplex within 1e-9 and is renormalized internally.
std::vector<long long> sample_multinomial(long long n, const Vector& probs, RngStream& rng);

// Zero-mean normal perturbation of the first C-1 cell probabilities,
// restricted by rejection to the support where every perturbed cell
// probability (including the implied last one) stays inside [0, 1].
// Throws RejectionBudgetError when `max_attempts` draws all fall outside.
Vector sample_truncated_mvn_on_simplex(const Vector& p, const SpdMatrix& cov, RngStream& rng,
                                       long max_attempts = 1000000);

// True iff `eps` satisfies the support constraints for base probabilities `p`.
bool simplex_support_ok(const Vector& p, const Vector& eps);

} // namespace seqmult

#endif // SEQMULT_STOCHASTICS_HPP
