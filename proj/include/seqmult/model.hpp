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

#ifndef SEQMULT_MODEL_HPP
#define SEQMULT_MODEL_HPP

#include <vector>

#include "seqmult/batch.hpp"
#include "seqmult/linalg.hpp"
#include "seqmult/rng.hpp"
#include "seqmult/stochastics.hpp"
#include "seqmult/vst.hpp"

namespace seqmult {

// Hierarchical prior for the working model
//
//   L_j ~ N(mu, Sigma / (n_j + 0.5))
//   mu ~ N(alpha, Sigma_p),  Sigma ~ IW(psi, nu),  Sigma_p ~ IW(psi_p, nu_p).
struct HierarchicalPrior {
    Vector alpha;      // length C-1, in transformed (radian) coordinates
    SpdMatrix psi;
    double nu = 5.0;
    SpdMatrix psi_p;
    double nu_p = 5.0;

    int dim() const { return static_cast<int>(alpha.size()); }
    // Checks dimensions and the propriety bounds nu > C-2, nu_p > C-2.
    void validate() const;
};

// Default prior: alpha at the transformed uniform simplex point, identity
// scale matrices, nu = nu_p = 5.
HierarchicalPrior default_prior(int categories);
// Prior centered on a past-shares probability vector (length C, renormalized).
HierarchicalPrior prior_from_shares(const Vector& shares, double nu = 5.0, double nu_p = 5.0);

struct PosteriorDraw {
    Vector mu;
    SpdMatrix sigma;
    SpdMatrix sigma_p;
};

struct GibbsConfig {
    int n_chains = 4;
    int burn_in = 1000;
    int thin = 10;
    int max_iters = 50000;
    double gr_threshold = 1.1;
    int n_samples = 2000;      // M: pooled post-convergence draws to return
    int check_interval = 500;  // iterations between convergence checks
    double vst_a = kDefaultVstA;

    void validate() const;
};

// Per-chain post-convergence draws plus convergence metadata.
struct ChainSet {
    std::vector<std::vector<PosteriorDraw>> chains;
    long iterations_run = 0;        // per chain, including burn-in
    long convergence_iteration = 0; // iteration at which the R-hat gate opened
    std::vector<double> rhat_final; // monitored scalars at the gate
    std::vector<std::pair<long, std::vector<double>>> rhat_history;

    // Deterministic merge ordered by (chain, draw index).
    std::vector<PosteriorDraw> pooled() const;
};

// Conditional posterior draws (the three Gibbs blocks).
//
// Sigma | mu, data ~ IW(psi + sum_i (n_i+0.5)(L_i-mu)(L_i-mu)', nu + j)
SpdMatrix sample_sigma_cond(const Vector& mu, const std::vector<TransformedObs>& data,
                            const HierarchicalPrior& prior, RngStream& rng);

// Sigma_p | mu ~ IW(psi_p + (mu-alpha)(mu-alpha)', nu_p + 1)
SpdMatrix sample_sigma_p_cond(const Vector& mu, const HierarchicalPrior& prior, RngStream& rng);

// mu | Sigma, Sigma_p, data ~ N(V^{-1} [Sigma_p^{-1} alpha + Sigma^{-1} sum_i (n_i+0.5) L_i], V^{-1})
// with V = Sigma_p^{-1} + (N_j + j/2) Sigma^{-1}.  Solves go through Cholesky.
struct MuCondParams {
    Vector mean;
    Matrix cov;
};
MuCondParams mu_cond_params(const SpdMatrix& sigma, const SpdMatrix& sigma_p,
                            const std::vector<TransformedObs>& data,
                            const HierarchicalPrior& prior);
Vector sample_mu_cond(const SpdMatrix& sigma, const SpdMatrix& sigma_p,
                      const std::vector<TransformedObs>& data, const HierarchicalPrior& prior,
                      RngStream& rng);

// Potential scale reduction factor over >= 2 chains of equal length L:
//   Rhat = sqrt(((L-1)/L * W + B/L) / W).
// Degenerate identical chains give 1.0; zero within-chain variance with
// nonzero between-chain variance gives +infinity.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

// Fits the hierarchical model on the first `upto` rounds of `series`:
// transforms each round, runs n_chains Gibbs chains from overdispersed prior
// initializations, monitors R-hat on the mu coordinates and log Sigma
// diagonal every check_interval iterations after burn-in, then collects
// >= n_samples pooled draws once every monitored R-hat is below threshold.
// Throws ConvergenceError (with the offending R-hat values) at max_iters.
ChainSet run_gibbs(const BatchSeries& series, int upto, const HierarchicalPrior& prior,
                   const GibbsConfig& config, const RngStream& rng);

// Same, on pre-transformed observations.
ChainSet run_gibbs(const std::vector<TransformedObs>& data, const HierarchicalPrior& prior,
                   const GibbsConfig& config, const RngStream& rng);

} // namespace seqmult

#endif // SEQMULT_MODEL_HPP
