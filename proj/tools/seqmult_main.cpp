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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "seqmult/io.hpp"
#include "seqmult/threading.hpp"

namespace {

using namespace seqmult;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitInfeasibleSpec = 4;

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string out_dir = ".";
};

RunConfig load_config(const GlobalOptions& gopts) {
    RunConfig cfg;
    if (!gopts.config_path.empty()) cfg = load_run_config(gopts.config_path);
    if (gopts.seed) cfg.seed = *gopts.seed;
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

int run_fit(const GlobalOptions& gopts, const std::string& rounds_path, int upto) {
    const RunConfig cfg = load_config(gopts);
    const RoundsFile rounds = read_rounds_csv(rounds_path);
    const int k = rounds.series.rounds();
    if (upto < 0) upto = k;
    if (upto < 1 || upto > k)
        throw ValidationError("--upto must lie in 1.." + std::to_string(k));
    const HierarchicalPrior prior = cfg.make_prior(rounds.series.categories());
    const ChainSet chains =
        run_gibbs(rounds.series, upto, prior, cfg.gibbs, RngStream(cfg.seed, 0));
    const nlohmann::json doc = fit_report_json(chains, rounds, upto, cfg.seed);
    write_file(fs::path(gopts.out_dir) / "fit.json", dump_json(doc));
    std::cout << dump_json(doc);
    return kExitOk;
}

int run_call(const GlobalOptions& gopts, const std::string& rounds_path,
             const std::string& mode_flag, int upto) {
    RunConfig cfg = load_config(gopts);
    if (!mode_flag.empty()) cfg.mode = mode_flag;
    const RoundsFile rounds = read_rounds_csv(rounds_path);
    const int k = rounds.series.rounds();
    if (upto < 0) upto = k;
    if (upto < 1 || upto > k)
        throw ValidationError("--upto must lie in 1.." + std::to_string(k));
    if (cfg.mode == "share" &&
        cfg.share.category >= rounds.series.categories())
        throw ValidationError("share category index out of range");

    const SequentialConfig sc = cfg.make_sequential_config();
    const bool collated = sc.is_election() &&
                          std::get<ElectionPolicy>(sc.policy).collate_top_two &&
                          rounds.series.categories() > 3;
    const int fit_categories = collated ? 3 : rounds.series.categories();
    const HierarchicalPrior prior = cfg.make_prior(fit_categories);

    const DecisionTrace trace =
        sequential_run(rounds.series, prior, sc, RngStream(cfg.seed, 0), upto);

    std::ostringstream trace_csv;
    write_trace_csv(trace_csv, trace, rounds);
    write_file(fs::path(gopts.out_dir) / "trace.csv", trace_csv.str());
    const nlohmann::json doc = decision_report_json(trace, rounds, cfg.mode, upto, cfg.seed);
    write_file(fs::path(gopts.out_dir) / "decision.json", dump_json(doc));
    std::cout << dump_json(doc);
    return kExitOk;
}

int run_simulate(const GlobalOptions& gopts) {
    const RunConfig cfg = load_config(gopts);
    if (!cfg.dgp) throw ValidationError("simulate requires a 'dgp' block in the config");
    const DgpSpec& spec = *cfg.dgp;
    const Dataset dataset = generate_dataset(spec, RngStream(cfg.seed, 0));
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(spec.C));
    for (int c = 1; c <= spec.C; ++c) names.push_back("cat_" + std::to_string(c));

    std::ostringstream csv;
    write_rounds_csv(csv, dataset.series, names);
    write_file(fs::path(gopts.out_dir) / "rounds.csv", csv.str());
    const nlohmann::json truth = truth_sidecar_json(dataset, spec, cfg.seed);
    write_file(fs::path(gopts.out_dir) / "truth.json", dump_json(truth));
    std::cout << dump_json(truth);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// replicate: desk-scale reruns of the published experiment grids with the
// reference values as a comparison column.
// ---------------------------------------------------------------------------

struct AccuracyCell {
    DgpKind dgp;
    int C;
    int K;
    long long n_paper;
    double ref_correct;
    double ref_incorrect;
    double ref_no_call;
};

struct DeltaCell {
    DgpKind dgp;
    double delta;
    double ref_correct;
    double ref_data_used; // percent; negative when not reported
};

const std::vector<AccuracyCell>& table_b_cells(DgpKind dgp) {
    static const std::vector<AccuracyCell> b1 = {
        {DgpKind::DGP1, 3, 25, 100, 95.8, 0.4, 3.8},   {DgpKind::DGP1, 3, 25, 1000, 99.2, 0.2, 0.6},
        {DgpKind::DGP1, 3, 25, 5000, 98.62, 0.92, 0.46}, {DgpKind::DGP1, 3, 25, 50000, 100.0, 0.0, 0.0},
        {DgpKind::DGP1, 3, 50, 100, 95.75, 0.75, 3.5}, {DgpKind::DGP1, 3, 50, 1000, 99.0, 0.0, 1.0},
        {DgpKind::DGP1, 3, 50, 5000, 99.5, 0.0, 0.5},  {DgpKind::DGP1, 3, 50, 50000, 100.0, 0.0, 0.0},
        {DgpKind::DGP1, 5, 25, 100, 93.75, 2.25, 4.0}, {DgpKind::DGP1, 5, 25, 1000, 98.25, 0.25, 1.5},
        {DgpKind::DGP1, 5, 25, 5000, 98.75, 0.25, 1.0}, {DgpKind::DGP1, 5, 25, 50000, 99.75, 0.0, 0.25},
        {DgpKind::DGP1, 5, 50, 100, 94.5, 1.5, 4.0},   {DgpKind::DGP1, 5, 50, 1000, 98.25, 0.5, 1.25},
        {DgpKind::DGP1, 5, 50, 5000, 99.5, 0.25, 0.25}, {DgpKind::DGP1, 5, 50, 50000, 100.0, 0.0, 0.0}};
    static const std::vector<AccuracyCell> b2 = {
        {DgpKind::DGP2, 3, 25, 100, 72.6, 8.0, 19.4},  {DgpKind::DGP2, 3, 25, 1000, 89.6, 2.8, 7.6},
        {DgpKind::DGP2, 3, 25, 5000, 89.6, 3.2, 7.2},  {DgpKind::DGP2, 3, 25, 50000, 98.2, 1.0, 0.8},
        {DgpKind::DGP2, 3, 50, 100, 77.5, 6.75, 15.75}, {DgpKind::DGP2, 3, 50, 1000, 88.0, 4.0, 8.0},
        {DgpKind::DGP2, 3, 50, 5000, 93.25, 3.75, 3.0}, {DgpKind::DGP2, 3, 50, 50000, 96.75, 1.0, 2.25},
        {DgpKind::DGP2, 5, 25, 100, 62.75, 13.75, 23.5}, {DgpKind::DGP2, 5, 25, 1000, 77.5, 8.75, 13.75},
        {DgpKind::DGP2, 5, 25, 5000, 85.75, 5.5, 8.75}, {DgpKind::DGP2, 5, 25, 50000, 93.0, 2.0, 5.0},
        {DgpKind::DGP2, 5, 50, 100, 70.0, 8.25, 21.75}, {DgpKind::DGP2, 5, 50, 1000, 84.75, 4.75, 10.5},
        {DgpKind::DGP2, 5, 50, 5000, 91.75, 3.25, 5.0}, {DgpKind::DGP2, 5, 50, 50000, 95.5, 2.25, 2.25}};
    static const std::vector<AccuracyCell> b3 = {
        {DgpKind::DGP3, 3, 25, 100, 43.0, 23.0, 34.0}, {DgpKind::DGP3, 3, 25, 1000, 49.8, 20.2, 30.0},
        {DgpKind::DGP3, 3, 25, 5000, 58.2, 15.0, 26.8}, {DgpKind::DGP3, 3, 25, 50000, 73.8, 8.8, 17.4},
        {DgpKind::DGP3, 3, 50, 100, 43.2, 18.0, 38.8}, {DgpKind::DGP3, 3, 50, 1000, 56.2, 13.4, 30.4},
        {DgpKind::DGP3, 3, 50, 5000, 64.6, 7.2, 28.2}, {DgpKind::DGP3, 3, 50, 50000, 79.4, 5.2, 15.4},
        {DgpKind::DGP3, 5, 25, 100, 40.0, 26.0, 34.0}, {DgpKind::DGP3, 5, 25, 1000, 42.6, 26.2, 31.2},
        {DgpKind::DGP3, 5, 25, 5000, 51.0, 24.0, 25.0}, {DgpKind::DGP3, 5, 25, 50000, 65.6, 10.6, 23.8},
        {DgpKind::DGP3, 5, 50, 100, 42.4, 22.0, 35.6}, {DgpKind::DGP3, 5, 50, 1000, 45.0, 23.2, 31.8},
        {DgpKind::DGP3, 5, 50, 5000, 55.8, 14.2, 30.0}, {DgpKind::DGP3, 5, 50, 50000, 70.0, 8.8, 21.2}};
    switch (dgp) {
        case DgpKind::DGP1: return b1;
        case DgpKind::DGP2: return b2;
        case DgpKind::DGP3: return b3;
    }
    return b1;
}

// Table 1 is the C=5, K=50 slice of the appendix grids.
std::vector<AccuracyCell> table1_cells() {
    std::vector<AccuracyCell> cells;
    for (DgpKind dgp : {DgpKind::DGP1, DgpKind::DGP2, DgpKind::DGP3})
        for (const AccuracyCell& cell : table_b_cells(dgp))
            if (cell.C == 5 && cell.K == 50) cells.push_back(cell);
    return cells;
}

const std::vector<DeltaCell>& table2_cells() {
    static const std::vector<DeltaCell> cells = {
        {DgpKind::DGP1, 0.01, 96.0, 14.0},  {DgpKind::DGP1, 0.05, 100.0, 12.0},
        {DgpKind::DGP1, 0.10, 100.0, 12.0}, {DgpKind::DGP1, 0.25, 100.0, 12.0},
        {DgpKind::DGP2, 0.01, 64.5, 22.0},  {DgpKind::DGP2, 0.05, 76.0, 22.0},
        {DgpKind::DGP2, 0.10, 89.5, 16.0},  {DgpKind::DGP2, 0.25, 100.0, 12.0},
        {DgpKind::DGP3, 0.01, 48.0, 26.0},  {DgpKind::DGP3, 0.05, 63.5, 24.0},
        {DgpKind::DGP3, 0.10, 68.0, 22.0},  {DgpKind::DGP3, 0.25, 74.5, 16.0}};
    return cells;
}

struct RmseRef {
    int checkpoint;
    double dgp1;
    double dgp2;
    double dgp3;
};

const std::vector<RmseRef>& table3_refs() {
    static const std::vector<RmseRef> refs = {{5, 0.06, 1.95, 4.38},
                                              {15, 0.01, 0.95, 2.21},
                                              {25, 0.01, 0.63, 1.46},
                                              {35, 0.01, 0.41, 0.92},
                                              {45, 0.01, 0.22, 0.51}};
    return refs;
}

long long scaled_n(long long n_paper, double scale) {
    return std::max<long long>(100, std::llround(static_cast<double>(n_paper) * scale));
}

int run_replicate(const GlobalOptions& gopts, const std::string& table, int reps, double scale) {
    const RunConfig cfg = load_config(gopts);
    if (reps < 1) throw ValidationError("--reps must be at least 1");
    if (reps < 10)
        std::cerr << "warning: " << reps
                  << " replicates give wide Monte Carlo intervals; interpret with care\n";
    const RngStream rng(cfg.seed, 0);

    SequentialConfig sc = cfg.make_sequential_config();
    sc.policy = simulation_election_policy();
    sc.schedule_source = FutureSchedule::Source::known;
    sc.horizon = -1;

    std::ostringstream csv;
    if (table == "1" || table == "B1" || table == "B2" || table == "B3") {
        std::vector<AccuracyCell> cells;
        if (table == "1") cells = table1_cells();
        else if (table == "B1") cells = table_b_cells(DgpKind::DGP1);
        else if (table == "B2") cells = table_b_cells(DgpKind::DGP2);
        else cells = table_b_cells(DgpKind::DGP3);
        csv << "dgp,C,K,n_paper,n_used,reps,correct_pct,incorrect_pct,no_call_pct,"
               "avg_margin_correct,ref_correct_pct,ref_incorrect_pct,ref_no_call_pct\n";
        int cell_idx = 0;
        for (const AccuracyCell& cell : cells) {
            DgpSpec spec;
            spec.kind = cell.dgp;
            spec.C = cell.C;
            spec.K = cell.K;
            spec.n = scaled_n(cell.n_paper, scale);
            spec.p_source = PSource::dirichlet();
            const ExperimentReport report = run_accuracy_experiment(
                spec, reps, sc, rng.derive(static_cast<std::uint64_t>(cell_idx)));
            csv << to_string(cell.dgp) << ',' << cell.C << ',' << cell.K << ',' << cell.n_paper
                << ',' << spec.n << ',' << reps << ',' << format_double(report.pct_correct) << ','
                << format_double(report.pct_incorrect) << ',' << format_double(report.pct_no_call)
                << ',' << format_double(report.avg_margin_correct) << ','
                << format_double(cell.ref_correct) << ',' << format_double(cell.ref_incorrect)
                << ',' << format_double(cell.ref_no_call) << '\n';
            ++cell_idx;
        }
    } else if (table == "2") {
        csv << "dgp,delta,n_paper,n_used,reps,correct_pct,incorrect_pct,no_call_pct,"
               "avg_data_used_pct,ref_correct_pct,ref_data_used_pct\n";
        int cell_idx = 0;
        for (const DeltaCell& cell : table2_cells()) {
            DgpSpec spec;
            spec.kind = cell.dgp;
            spec.C = 3;
            spec.K = 25;
            spec.n = scaled_n(5000, scale);
            spec.p_source = PSource::delta_gap(cell.delta);
            const ExperimentReport report = run_accuracy_experiment(
                spec, reps, sc, rng.derive(static_cast<std::uint64_t>(cell_idx)));
            csv << to_string(cell.dgp) << ',' << format_double(cell.delta) << ",5000," << spec.n
                << ',' << reps << ',' << format_double(report.pct_correct) << ','
                << format_double(report.pct_incorrect) << ',' << format_double(report.pct_no_call)
                << ',' << format_double(100.0 * report.avg_data_frac_used) << ','
                << format_double(cell.ref_correct) << ',' << format_double(cell.ref_data_used)
                << '\n';
            ++cell_idx;
        }
    } else if (table == "3") {
        csv << "checkpoint,dgp,rmse_pct,ref_rmse_pct,reps,n_used\n";
        std::vector<int> checkpoints;
        for (const RmseRef& ref : table3_refs()) checkpoints.push_back(ref.checkpoint);
        int dgp_idx = 0;
        for (DgpKind dgp : {DgpKind::DGP1, DgpKind::DGP2, DgpKind::DGP3}) {
            DgpSpec spec;
            spec.kind = dgp;
            spec.C = 5;
            spec.K = 50;
            spec.n = scaled_n(50000, scale);
            spec.p_source = PSource::dirichlet();
            const auto rmse = run_share_rmse_experiment(
                spec, checkpoints, reps, sc, rng.derive(static_cast<std::uint64_t>(dgp_idx)));
            for (std::size_t i = 0; i < rmse.size(); ++i) {
                const RmseRef& ref = table3_refs()[i];
                const double ref_val =
                    dgp == DgpKind::DGP1 ? ref.dgp1 : (dgp == DgpKind::DGP2 ? ref.dgp2 : ref.dgp3);
                csv << rmse[i].first << ',' << to_string(dgp) << ','
                    << format_double(rmse[i].second) << ',' << format_double(ref_val) << ','
                    << reps << ',' << spec.n << '\n';
            }
            ++dgp_idx;
        }
    } else {
        throw ValidationError("unknown table '" + table + "' (expected 1, 2, 3, B1, B2 or B3)");
    }

    const fs::path out_csv = fs::path(gopts.out_dir) / ("table_" + table + ".csv");
    write_file(out_csv, csv.str());
    std::cout << csv.str();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential Bayesian inference and race calling for batched multinomial counts"};
    app.require_subcommand(1);

    GlobalOptions gopts;
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "Seed override");
    app.add_option("--config", gopts.config_path, "JSON configuration file");
    app.add_option("--out", gopts.out_dir, "Output directory")->capture_default_str();

    std::string rounds_path;
    std::string mode;
    int upto = -1;

    CLI::App* fit = app.add_subcommand("fit", "Fit the posterior on a rounds file");
    fit->add_option("rounds", rounds_path, "Rounds CSV file")->required();
    fit->add_option("--upto", upto, "Use only the first j rounds");

    CLI::App* call = app.add_subcommand("call", "Sequential decision rule on a rounds file");
    call->add_option("rounds", rounds_path, "Rounds CSV file")->required();
    call->add_option("--mode", mode, "election or share")
        ->check(CLI::IsMember({"election", "share"}));
    call->add_option("--upto", upto, "Decide after the first j rounds");

    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic rounds file");

    std::string table = "2";
    int reps = 20;
    double scale = 0.1;
    CLI::App* replicate = app.add_subcommand("replicate", "Desk-scale experiment tables");
    replicate->add_option("--table", table, "1, 2, 3, B1, B2 or B3")->capture_default_str();
    replicate->add_option("--reps", reps, "Replicates per cell")->capture_default_str();
    replicate->add_option("--scale", scale, "Batch-size scale factor")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) gopts.seed = seed_flag;

    try {
        std::filesystem::create_directories(gopts.out_dir);
        if (app.got_subcommand(fit)) return run_fit(gopts, rounds_path, upto);
        if (app.got_subcommand(call)) return run_call(gopts, rounds_path, mode, upto);
        if (app.got_subcommand(simulate)) return run_simulate(gopts);
        if (app.got_subcommand(replicate)) return run_replicate(gopts, table, reps, scale);
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const InfeasibleSpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasibleSpec;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
