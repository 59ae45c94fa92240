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

#ifndef SEQMULT_IO_HPP
#define SEQMULT_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqmult/decisions.hpp"
#include "seqmult/simlab.hpp"

namespace seqmult {

// ---------------------------------------------------------------------------
// Rounds file: CSV with header `round,n,<cat_1>,...,<cat_C>`, one row per
// round in counting order, rounds numbered 1..K, row sums matching n.
// ---------------------------------------------------------------------------

struct RoundsFile {
    std::vector<std::string> category_names;
    BatchSeries series{2};
};

RoundsFile parse_rounds_csv(std::istream& in, const std::string& what);
RoundsFile read_rounds_csv(const std::string& path);
void write_rounds_csv(std::ostream& out, const BatchSeries& series,
                      const std::vector<std::string>& category_names);

// ---------------------------------------------------------------------------
// Run configuration (JSON document, strictly schema-validated; unknown keys
// rejected).
// ---------------------------------------------------------------------------

struct RunConfig {
    std::uint64_t seed = 1;

    // Prior block: alpha is supplied as a probability vector (past shares)
    // and mapped into transformed coordinates internally; absent means flat.
    std::optional<Vector> alpha_shares;
    std::optional<Matrix> psi;    // absent = identity
    std::optional<Matrix> psi_p;  // absent = identity
    double nu = 5.0;
    double nu_p = 5.0;

    GibbsConfig gibbs;

    std::string mode = "election"; // "election" | "share"
    ElectionPolicy election;
    SharePolicy share;

    FutureSchedule::Source schedule_source = FutureSchedule::Source::average_of_observed;
    int horizon = -1;

    int n_sims = 4000;
    double vst_a = kDefaultVstA;

    std::optional<DgpSpec> dgp;

    // Prior for a fit on `fit_categories` categories.
    HierarchicalPrior make_prior(int fit_categories) const;
    SequentialConfig make_sequential_config() const;
};

// Throws ValidationError with a JSON-pointer-style path on any violation.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

// The JSON schema the run configuration is validated against (also shipped
// under schemas/run_config.schema.json).
const nlohmann::json& run_config_schema();

// Minimal JSON-schema subset validator (type/enum/properties/required/
// additionalProperties/items/bounds/anyOf).  Returns the first violation as
// "path: message", or an empty string when the document conforms.
std::string validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema);

// ---------------------------------------------------------------------------
// Report documents.
// ---------------------------------------------------------------------------

nlohmann::json fit_report_json(const ChainSet& chains, const RoundsFile& rounds, int upto,
                               std::uint64_t seed);
nlohmann::json decision_report_json(const DecisionTrace& trace, const RoundsFile& rounds,
                                    const std::string& mode, int upto, std::uint64_t seed);
nlohmann::json truth_sidecar_json(const Dataset& dataset, const DgpSpec& spec,
                                  std::uint64_t seed);

// Per-round trace CSV (one fixed column order for both modes; share columns
// empty in election mode).
void write_trace_csv(std::ostream& out, const DecisionTrace& trace, const RoundsFile& rounds);

// Shortest-roundtrip decimal formatting (deterministic across runs).
std::string format_double(double v);

} // namespace seqmult

#endif // SEQMULT_IO_HPP
