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

#include "seqmult/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqmult/threading.hpp"

namespace seqmult {

const char* to_string(DgpKind k) {
    switch (k) {
        case DgpKind::DGP1: return "DGP1";
        case DgpKind::DGP2: return "DGP2";
        case DgpKind::DGP3: return "DGP3";
    }
    return "unknown";
}

PSource PSource::dirichlet() { return PSource{}; }

PSource PSource::fixed(Vector p) {
    PSource s;
    s.kind = Kind::fixed;
    s.fixed_p = std::move(p);
    return s;
}

PSource PSource::delta_gap(double delta) {
    PSource s;
    s.kind = Kind::delta_gap;
    s.delta = delta;
    return s;
}

void DgpSpec::validate() const {
    if (C < 2) throw InfeasibleSpecError("dgp: C must be at least 2");
    if (K < 1) throw InfeasibleSpecError("dgp: K must be at least 1");
    if (n < 1) throw InfeasibleSpecError("dgp: n must be at least 1");
    if (p_source.kind == PSource::Kind::fixed) {
        if (static_cast<int>(p_source.fixed_p.size()) != C)
            throw InfeasibleSpecError("dgp: fixed p must have C entries");
        double total = 0.0;
        for (double v : p_source.fixed_p) {
            if (v < 0.0) throw InfeasibleSpecError("dgp: fixed p has a negative entry");
            total += v;
        }
        if (std::fabs(total - 1.0) > 1e-9)
            throw InfeasibleSpecError("dgp: fixed p must sum to 1");
    }
    if (p_source.kind == PSource::Kind::delta_gap) {
        if (!(p_source.delta > 0.0) || p_source.delta >= 1.0)
            throw InfeasibleSpecError("dgp: delta gap must lie in (0, 1)");
    }
    if (p_source.kind == PSource::Kind::dirichlet_equal && !(p_source.dirichlet_conc > 0.0))
        throw InfeasibleSpecError("dgp: dirichlet concentration must be positive");
    if (kind == DgpKind::DGP3 && A && A->dim() != C - 1)
        throw InfeasibleSpecError("dgp: A must be (C-1)-dimensional");
    if (!(eps_cov_power > 0.0)) throw InfeasibleSpecError("dgp: eps covariance power must be positive");
}

SpdMatrix random_spd(int dim, RngStream& rng) {
    if (dim < 1) throw ValidationError("random_spd: dim must be at least 1");
    Matrix g(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.normal01();
    Matrix out(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) s += g(i, k) * g(j, k);
            s /= static_cast<double>(dim);
            out(i, j) = s;
            out(j, i) = s;
        }
    for (int i = 0; i < dim; ++i) out(i, i) += 0.1;
    return SpdMatrix(out, "random SPD");
}

SpdMatrix eps_covariance(const DgpSpec& spec, long long n, const std::optional<SpdMatrix>& a) {
    const int dim = spec.C - 1;
    const double scale = std::pow(static_cast<double>(n), -spec.eps_cov_power);
    switch (spec.kind) {
        case DgpKind::DGP1: return SpdMatrix(Matrix(dim));
        case DgpKind::DGP2: return SpdMatrix(scale * Matrix::identity(dim));
        case DgpKind::DGP3:
            if (!a) throw InfeasibleSpecError("dgp: DGP3 covariance needs A");
            return SpdMatrix(scale * a->raw());
    }
    throw InfeasibleSpecError("dgp: unknown kind");
}

namespace {

Vector draw_delta_gap_p(int c, double delta, RngStream& rng) {
    const Vector ones(static_cast<std::size_t>(c), 1.0);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Vector p(static_cast<std::size_t>(c), 0.0);
        double rest_max = 0.0;
        double rest_sum = 0.0;
        if (c > 2) {
            const Vector q = sample_dirichlet(ones, rng);
            for (int i = 2; i < c; ++i) {
                p[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)];
                rest_sum += q[static_cast<std::size_t>(i)];
                rest_max = std::max(rest_max, q[static_cast<std::size_t>(i)]);
            }
        }
        const double s = 1.0 - rest_sum;
        const double p1 = 0.5 * (s + delta);
        const double p2 = 0.5 * (s - delta);
        if (p2 <= rest_max || p2 <= 0.0 || p1 >= 1.0) continue;
        p[0] = p1;
        p[1] = p2;
        return p;
    }
    throw InfeasibleSpecError("dgp: delta gap " + std::to_string(delta) +
                              " admits no valid probability vector");
}

} // namespace

Dataset generate_dataset(const DgpSpec& spec, RngStream rng) {
    spec.validate();
    Dataset out;
    switch (spec.p_source.kind) {
        case PSource::Kind::dirichlet_equal:
            out.true_p = sample_dirichlet(
                Vector(static_cast<std::size_t>(spec.C), spec.p_source.dirichlet_conc), rng);
            break;
        case PSource::Kind::fixed: {
            out.true_p = spec.p_source.fixed_p;
            double total = 0.0;
            for (double v : out.true_p) total += v;
            for (double& v : out.true_p) v /= total;
            break;
        }
        case PSource::Kind::delta_gap:
            out.true_p = draw_delta_gap_p(spec.C, spec.p_source.delta, rng);
            break;
    }
    if (spec.kind == DgpKind::DGP3)
        out.a_used = spec.A ? *spec.A : random_spd(spec.C - 1, rng);

    out.series = BatchSeries(spec.C);
    const int cm1 = spec.C - 1;
    for (int j = 0; j < spec.K; ++j) {
        long long n_j = spec.n;
        if (spec.poisson_sizes)
            n_j = std::max<long long>(1, sample_poisson(static_cast<double>(spec.n), rng));
        Vector p_round(out.true_p);
        if (spec.kind != DgpKind::DGP1) {
            const SpdMatrix cov = eps_covariance(spec, n_j, out.a_used);
            const Vector eps = sample_truncated_mvn_on_simplex(out.true_p, cov, rng);
            double eps_sum = 0.0;
            for (int c = 0; c < cm1; ++c) {
                p_round[static_cast<std::size_t>(c)] += eps[static_cast<std::size_t>(c)];
                eps_sum += eps[static_cast<std::size_t>(c)];
            }
            p_round[static_cast<std::size_t>(cm1)] -= eps_sum;
        }
        out.series.add_round(n_j, sample_multinomial(n_j, p_round, rng));
    }
    return out;
}

ReplicateOutcome classify_trace(const BatchSeries& series, const DecisionTrace& trace) {
    ReplicateOutcome out;
    const std::vector<long long> y = series.cumulative(series.rounds());
    long long top = y[0], second = y.size() > 1 ? y[1] : 0;
    if (second > top) std::swap(top, second);
    int winner = static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin());
    for (std::size_t i = 2; i < y.size(); ++i) {
        if (y[i] > top) {
            second = top;
            top = y[i];
        } else if (y[i] > second) {
            second = y[i];
        }
    }
    out.true_winner = winner;
    out.final_margin = top - second;
    if (trace.first_call_round && trace.first_call_category) {
        out.called_category = *trace.first_call_category;
        out.data_frac_used =
            trace.rounds[static_cast<std::size_t>(*trace.first_call_round - 1)].outcome.data_frac_used;
        // A call on any category tied for the realized maximum counts as correct.
        out.cls = (y[static_cast<std::size_t>(out.called_category)] == top)
                      ? OutcomeClass::correct
                      : OutcomeClass::incorrect;
    } else {
        out.cls = OutcomeClass::no_call;
    }
    return out;
}

namespace {

void aggregate_outcomes(ExperimentReport& report) {
    const double n = static_cast<double>(report.outcomes.size());
    long long n_correct = 0, n_incorrect = 0, n_nocall = 0;
    double m_correct = 0.0, m_incorrect = 0.0, m_nocall = 0.0;
    double frac_sum = 0.0;
    long long frac_count = 0;
    for (const ReplicateOutcome& o : report.outcomes) {
        switch (o.cls) {
            case OutcomeClass::correct:
                ++n_correct;
                m_correct += static_cast<double>(o.final_margin);
                break;
            case OutcomeClass::incorrect:
                ++n_incorrect;
                m_incorrect += static_cast<double>(o.final_margin);
                break;
            case OutcomeClass::no_call:
                ++n_nocall;
                m_nocall += static_cast<double>(o.final_margin);
                break;
        }
        if (o.data_frac_used >= 0.0) {
            frac_sum += o.data_frac_used;
            ++frac_count;
        }
    }
    report.pct_correct = 100.0 * static_cast<double>(n_correct) / n;
    report.pct_incorrect = 100.0 * static_cast<double>(n_incorrect) / n;
    report.pct_no_call = 100.0 * static_cast<double>(n_nocall) / n;
    report.avg_margin_correct = n_correct ? m_correct / static_cast<double>(n_correct) : 0.0;
    report.avg_margin_incorrect = n_incorrect ? m_incorrect / static_cast<double>(n_incorrect) : 0.0;
    report.avg_margin_no_call = n_nocall ? m_nocall / static_cast<double>(n_nocall) : 0.0;
    report.avg_data_frac_used = frac_count ? frac_sum / static_cast<double>(frac_count) : 0.0;
}

} // namespace

ExperimentReport run_accuracy_experiment(const DgpSpec& spec, int n_reps,
                                         const SequentialConfig& config, RngStream rng) {
    if (n_reps < 1) throw ValidationError("run_accuracy_experiment: n_reps must be >= 1");
    spec.validate();
    const bool collated =
        config.is_election() && std::get<ElectionPolicy>(config.policy).collate_top_two;
    const HierarchicalPrior prior = default_prior(collated ? std::min(spec.C, 3) : spec.C);

    ExperimentReport report;
    report.outcomes.resize(static_cast<std::size_t>(n_reps));
    parallel_for(n_reps, [&](int rep) {
        const RngStream rep_rng = rng.derive(static_cast<std::uint64_t>(rep));
        const Dataset data = generate_dataset(spec, rep_rng.derive(0));
        const DecisionTrace trace =
            sequential_run(data.series, prior, config, rep_rng.derive(1));
        report.outcomes[static_cast<std::size_t>(rep)] = classify_trace(data.series, trace);
    });
    aggregate_outcomes(report);
    return report;
}

std::vector<std::pair<int, double>> run_share_rmse_experiment(
    const DgpSpec& spec, const std::vector<int>& checkpoints, int n_reps,
    const SequentialConfig& config, RngStream rng) {
    if (n_reps < 1) throw ValidationError("run_share_rmse_experiment: n_reps must be >= 1");
    spec.validate();
    for (int cp : checkpoints)
        if (cp < 1 || cp > spec.K)
            throw ValidationError("run_share_rmse_experiment: checkpoint outside 1..K");
    const HierarchicalPrior prior = default_prior(spec.C);

    struct Cell {
        double sq_sum = 0.0;
        long long count = 0;
    };
    std::vector<std::vector<Cell>> cells(
        static_cast<std::size_t>(n_reps),
        std::vector<Cell>(checkpoints.size()));

    parallel_for(n_reps, [&](int rep) {
        const RngStream rep_rng = rng.derive(static_cast<std::uint64_t>(rep));
        const Dataset data = generate_dataset(spec, rep_rng.derive(0));
        const BatchSeries& series = data.series;
        const std::vector<long long> y_final = series.cumulative(series.rounds());
        const double total = static_cast<double>(series.total_trials());

        for (std::size_t ci = 0; ci < checkpoints.size(); ++ci) {
            const int j = checkpoints[ci];
            const RngStream cp_rng = rep_rng.derive(1 + static_cast<std::uint64_t>(ci));
            ChainSet chains;
            try {
                chains = run_gibbs(series, j, prior, config.gibbs, cp_rng.derive(0));
            } catch (const ConvergenceError&) {
                continue; // recorded as a missing cell
            }
            const FutureSchedule schedule =
                config.schedule_source == FutureSchedule::Source::known
                    ? FutureSchedule::from_series(series, j, spec.K)
                    : FutureSchedule::average_of_observed(series, j, spec.K);
            const std::vector<PredictiveDraw> draws =
                simulate_future(chains, series, j, schedule, config.n_sims, cp_rng.derive(1),
                                /*keep_path=*/false, config.gibbs.vst_a);
            Vector predicted(static_cast<std::size_t>(spec.C), 0.0);
            for (const PredictiveDraw& d : draws) {
                long long t = 0;
                for (long long v : d.y_final) t += v;
                for (int c = 0; c < spec.C; ++c)
                    predicted[static_cast<std::size_t>(c)] +=
                        static_cast<double>(d.y_final[static_cast<std::size_t>(c)]) /
                        static_cast<double>(t);
            }
            Cell& cell = cells[static_cast<std::size_t>(rep)][ci];
            for (int c = 0; c < spec.C; ++c) {
                const double pred =
                    predicted[static_cast<std::size_t>(c)] / static_cast<double>(draws.size());
                const double realized =
                    static_cast<double>(y_final[static_cast<std::size_t>(c)]) / total;
                cell.sq_sum += (pred - realized) * (pred - realized);
                cell.count += 1;
            }
        }
    });

    std::vector<std::pair<int, double>> rmse;
    rmse.reserve(checkpoints.size());
    for (std::size_t ci = 0; ci < checkpoints.size(); ++ci) {
        double sq = 0.0;
        long long count = 0;
        for (int rep = 0; rep < n_reps; ++rep) {
            sq += cells[static_cast<std::size_t>(rep)][ci].sq_sum;
            count += cells[static_cast<std::size_t>(rep)][ci].count;
        }
        rmse.emplace_back(checkpoints[ci],
                          count ? 100.0 * std::sqrt(sq / static_cast<double>(count)) : 0.0);
    }
    return rmse;
}

PermutationSummary run_permutation_study(const BatchSeries& series,
                                         const HierarchicalPrior& prior, int n_perms,
                                         const SequentialConfig& config, RngStream rng) {
    if (n_perms < 1) throw ValidationError("run_permutation_study: n_perms must be >= 1");
    const int k = series.rounds();
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(n_perms));
    for (int i = 0; i < n_perms; ++i) {
        std::vector<int> order(static_cast<std::size_t>(k));
        std::iota(order.begin(), order.end(), 0);
        if (i > 0) {
            RngStream perm_rng = rng.derive(static_cast<std::uint64_t>(i));
            for (int j = k - 1; j > 0; --j) {
                const int m = static_cast<int>(
                    perm_rng.uniform_below(static_cast<std::uint64_t>(j + 1)));
                std::swap(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(m)]);
            }
        }
        perms[static_cast<std::size_t>(i)] = std::move(order);
    }

    PermutationSummary summary;
    summary.per_permutation.resize(static_cast<std::size_t>(n_perms));
    parallel_for(n_perms, [&](int i) {
        const BatchSeries permuted = series.permuted(perms[static_cast<std::size_t>(i)]);
        const DecisionTrace trace = sequential_run(
            permuted, prior, config, rng.derive(1000000 + static_cast<std::uint64_t>(i)));
        summary.per_permutation[static_cast<std::size_t>(i)] = classify_trace(permuted, trace);
    });

    const double n = static_cast<double>(n_perms);
    for (const ReplicateOutcome& o : summary.per_permutation) {
        switch (o.cls) {
            case OutcomeClass::correct: summary.pct_correct += 1.0; break;
            case OutcomeClass::incorrect: summary.pct_incorrect += 1.0; break;
            case OutcomeClass::no_call: summary.pct_no_call += 1.0; break;
        }
    }
    summary.pct_correct *= 100.0 / n;
    summary.pct_incorrect *= 100.0 / n;
    summary.pct_no_call *= 100.0 / n;
    return summary;
}

} // namespace seqmult
