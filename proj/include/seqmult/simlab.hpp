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

#ifndef SEQMULT_SIMLAB_HPP
#define SEQMULT_SIMLAB_HPP

#include <optional>
#include <string>
#include <vector>

#include "seqmult/decisions.hpp"

namespace seqmult {

// The three perturbation regimes: none, independent truncated normal with
// covariance n^{-1/2} I, and correlated truncated normal with covariance
// n^{-1/2} A for a random SPD matrix A.
enum class DgpKind { DGP1, DGP2, DGP3 };

const char* to_string(DgpKind k);

struct PSource {
    enum class Kind { dirichlet_equal, fixed, delta_gap };
    Kind kind = Kind::dirichlet_equal;
    Vector fixed_p;                // kind == fixed
    double delta = 0.0;            // kind == delta_gap: p1 - p2
    double dirichlet_conc = 1.0;   // kind == dirichlet_equal

    static PSource dirichlet();
    static PSource fixed(Vector p);
    static PSource delta_gap(double delta);
};

struct DgpSpec {
    DgpKind kind = DgpKind::DGP1;
    int C = 3;
    int K = 25;
    long long n = 1000;
    PSource p_source;
    std::optional<SpdMatrix> A; // DGP3 only; drawn per dataset when absent
    bool poisson_sizes = false; // sensitivity flag: batch sizes ~ Poisson(n)
    // Covariance of the perturbations is n^{-power} * (I or A); the written
    // form is power = 0.5, the square-root-scaling alternative is 1.0.
    double eps_cov_power = 0.5;

    void validate() const;
};

struct Dataset {
    Vector true_p;
    BatchSeries series{2};
    std::optional<SpdMatrix> a_used;
};

// Draws the fixed cell probabilities per p_source, then per round draws the
// perturbation for the DGP kind and a multinomial count vector.
Dataset generate_dataset(const DgpSpec& spec, RngStream rng);

// G G'/dim + 0.1 I for G with iid standard normal entries.
SpdMatrix random_spd(int dim, RngStream& rng);

// Covariance matrix of the perturbations for one round of size n (zero for
// DGP1).
SpdMatrix eps_covariance(const DgpSpec& spec, long long n, const std::optional<SpdMatrix>& a);

enum class OutcomeClass { correct, incorrect, no_call };

struct ReplicateOutcome {
    OutcomeClass cls = OutcomeClass::no_call;
    int called_category = -1;
    int true_winner = -1;       // realized final maximal category
    long long final_margin = 0; // realized Y^(1) - Y^(2)
    double data_frac_used = -1.0; // -1 when no call was made
};

struct ExperimentReport {
    std::vector<ReplicateOutcome> outcomes;
    double pct_correct = 0.0;
    double pct_incorrect = 0.0;
    double pct_no_call = 0.0;
    double avg_margin_correct = 0.0;
    double avg_margin_incorrect = 0.0;
    double avg_margin_no_call = 0.0;
    // Average fraction of trials observed at the first call, over calls.
    double avg_data_frac_used = 0.0;
    std::vector<std::pair<int, double>> rmse_by_checkpoint;
};

// Race-calling accuracy experiment: per replicate, generate a dataset, run
// the sequential decision rule, classify the first call against the realized
// final winner.  Replicates run in parallel on per-replicate streams.
ExperimentReport run_accuracy_experiment(const DgpSpec& spec, int n_reps,
                                         const SequentialConfig& config, RngStream rng);

// RMSE (in percent) of the predicted final cumulative proportions against the
// realized ones, across categories and replicates, at each checkpoint round.
std::vector<std::pair<int, double>> run_share_rmse_experiment(const DgpSpec& spec,
                                                              const std::vector<int>& checkpoints,
                                                              int n_reps,
                                                              const SequentialConfig& config,
                                                              RngStream rng);

struct PermutationSummary {
    double pct_correct = 0.0;
    double pct_incorrect = 0.0;
    double pct_no_call = 0.0;
    std::vector<ReplicateOutcome> per_permutation;
};

// Rerun the sequential rule on permuted round orders (permutation 0 is the
// identity) and classify each run against the realized final winner.
PermutationSummary run_permutation_study(const BatchSeries& series,
                                         const HierarchicalPrior& prior, int n_perms,
                                         const SequentialConfig& config, RngStream rng);

// Classification helper shared by the experiment drivers.
ReplicateOutcome classify_trace(const BatchSeries& series, const DecisionTrace& trace);

} // namespace seqmult

#endif // SEQMULT_SIMLAB_HPP
