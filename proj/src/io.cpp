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

#include "seqmult/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace seqmult {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

long long parse_ll(const std::string& s, const std::string& where) {
    const std::string t = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ValidationError(where + ": '" + s + "' is not an integer");
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

RoundsFile parse_rounds_csv(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(what + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4 || trim(header[0]) != "round" || trim(header[1]) != "n")
        throw ValidationError(what + ": header must be 'round,n,<cat_1>,...,<cat_C>' with C >= 2");
    RoundsFile out;
    for (std::size_t i = 2; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name.empty()) throw ValidationError(what + ": empty category name in header");
        out.category_names.push_back(name);
    }
    out.series = BatchSeries(static_cast<int>(out.category_names.size()));

    int row = 1; // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        const std::string where = what + " row " + std::to_string(row);
        if (fields.size() != header.size())
            throw ValidationError(where + ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
        const long long round_no = parse_ll(fields[0], where);
        if (round_no != out.series.rounds() + 1)
            throw ValidationError(where + ": rounds must increase from 1; expected " +
                                  std::to_string(out.series.rounds() + 1) + ", got " +
                                  std::to_string(round_no));
        const long long n = parse_ll(fields[1], where);
        std::vector<long long> counts;
        counts.reserve(out.category_names.size());
        for (std::size_t i = 2; i < fields.size(); ++i) counts.push_back(parse_ll(fields[i], where));
        try {
            out.series.add_round(n, std::move(counts));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    if (out.series.rounds() == 0) throw ValidationError(what + ": no data rows");
    return out;
}

RoundsFile read_rounds_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open rounds file '" + path + "'");
    return parse_rounds_csv(in, path);
}

void write_rounds_csv(std::ostream& out, const BatchSeries& series,
                      const std::vector<std::string>& category_names) {
    if (static_cast<int>(category_names.size()) != series.categories())
        throw ValidationError("write_rounds_csv: category name count mismatch");
    out << "round,n";
    for (const std::string& name : category_names) out << ',' << name;
    out << '\n';
    for (int j = 0; j < series.rounds(); ++j) {
        const Round& r = series.round(j);
        out << (j + 1) << ',' << r.n;
        for (long long c : r.counts) out << ',' << c;
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Schema validation
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

bool type_matches(const json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

std::string validate_node(const json& doc, const json& schema, const std::string& path) {
    if (schema.contains("anyOf")) {
        std::string first;
        for (const json& option : schema["anyOf"]) {
            const std::string err = validate_node(doc, option, path);
            if (err.empty()) return "";
            if (first.empty()) first = err;
        }
        return path + ": no anyOf alternative matched (" + first + ")";
    }
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(doc, t.get<std::string>());
        } else {
            for (const json& ti : t) ok = ok || type_matches(doc, ti.get<std::string>());
        }
        if (!ok) return path + ": wrong type, expected " + t.dump();
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& v : schema["enum"]) ok = ok || v == doc;
        if (!ok) return path + ": value " + doc.dump() + " not in " + schema["enum"].dump();
    }
    if (doc.is_number()) {
        const double v = doc.get<double>();
        if (schema.contains("minimum") && v < schema["minimum"].get<double>())
            return path + ": value below minimum " + schema["minimum"].dump();
        if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>())
            return path + ": value must exceed " + schema["exclusiveMinimum"].dump();
        if (schema.contains("maximum") && v > schema["maximum"].get<double>())
            return path + ": value above maximum " + schema["maximum"].dump();
        if (schema.contains("exclusiveMaximum") && v >= schema["exclusiveMaximum"].get<double>())
            return path + ": value must be below " + schema["exclusiveMaximum"].dump();
    }
    if (doc.is_array()) {
        if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
            return path + ": fewer than " + schema["minItems"].dump() + " items";
        if (schema.contains("maxItems") && doc.size() > schema["maxItems"].get<std::size_t>())
            return path + ": more than " + schema["maxItems"].dump() + " items";
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < doc.size(); ++i) {
                const std::string err =
                    validate_node(doc[i], schema["items"], path + "/" + std::to_string(i));
                if (!err.empty()) return err;
            }
        }
    }
    if (doc.is_object()) {
        const json props = schema.value("properties", json::object());
        if (schema.contains("required")) {
            for (const json& key : schema["required"])
                if (!doc.contains(key.get<std::string>()))
                    return path + ": missing required key '" + key.get<std::string>() + "'";
        }
        const bool additional = schema.value("additionalProperties", true);
        for (const auto& [key, value] : doc.items()) {
            if (props.contains(key)) {
                const std::string err = validate_node(value, props[key], path + "/" + key);
                if (!err.empty()) return err;
            } else if (!additional) {
                return path + ": unknown key '" + key + "'";
            }
        }
    }
    return "";
}

} // namespace

std::string validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema) {
    return validate_node(doc, schema, "#");
}

const nlohmann::json& run_config_schema() {
    static const nlohmann::json schema = nlohmann::json::parse(R"SCHEMA(
{
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "seed": {"type": "integer", "minimum": 0},
    "prior": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "alpha": {"type": "array", "minItems": 2, "items": {"type": "number", "minimum": 0}},
        "psi": {"anyOf": [{"type": "string", "enum": ["identity"]},
                           {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}]},
        "psi_p": {"anyOf": [{"type": "string", "enum": ["identity"]},
                             {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}]},
        "nu": {"type": "number"},
        "nu_p": {"type": "number"}
      }
    },
    "gibbs": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "n_chains": {"type": "integer", "minimum": 2},
        "burn_in": {"type": "integer", "minimum": 0},
        "thin": {"type": "integer", "minimum": 1},
        "max_iters": {"type": "integer", "minimum": 1},
        "gr_threshold": {"type": "number", "exclusiveMinimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "check_interval": {"type": "integer", "minimum": 1}
      }
    },
    "policy": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "mode": {"type": "string", "enum": ["election", "share"]},
        "min_counted_frac": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "confidence": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "margin_frac_of_remaining": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "margin_summary": {"type": "string", "enum": ["mean", "median", "lower_quantile"]},
        "lower_quantile": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "collate_top_two": {"type": "boolean"},
        "min_rounds": {"type": "integer", "minimum": 0},
        "margin_of_error": {"type": "number", "exclusiveMinimum": 0},
        "category": {"type": "integer", "minimum": 0}
      }
    },
    "schedule": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "source": {"type": "string", "enum": ["known", "average_of_observed"]},
        "horizon": {"type": "integer", "minimum": 1}
      }
    },
    "n_sims": {"type": "integer", "minimum": 1},
    "vst_a": {"type": "number", "exclusiveMinimum": 0},
    "dgp": {
      "type": "object",
      "additionalProperties": false,
      "required": ["kind"],
      "properties": {
        "kind": {"type": "string", "enum": ["DGP1", "DGP2", "DGP3"]},
        "C": {"type": "integer", "minimum": 2},
        "K": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "p": {"anyOf": [{"type": "string", "enum": ["dirichlet"]},
                         {"type": "array", "minItems": 2, "items": {"type": "number", "minimum": 0}},
                         {"type": "object", "additionalProperties": false,
                          "required": ["delta_gap"],
                          "properties": {"delta_gap": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}}}]},
        "dirichlet_conc": {"type": "number", "exclusiveMinimum": 0},
        "poisson_sizes": {"type": "boolean"},
        "eps_cov_power": {"type": "number", "exclusiveMinimum": 0},
        "A": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
      }
    }
  }
}
)SCHEMA");
    return schema;
}

namespace {

Matrix parse_matrix(const json& doc, const std::string& where) {
    const int dim = static_cast<int>(doc.size());
    if (dim == 0) throw ValidationError(where + ": empty matrix");
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) {
        if (static_cast<int>(doc[static_cast<std::size_t>(i)].size()) != dim)
            throw ValidationError(where + ": matrix must be square");
        for (int j = 0; j < dim; ++j)
            m(i, j) = doc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

} // namespace

RunConfig parse_run_config(const nlohmann::json& doc) {
    const std::string err = validate_against_schema(doc, run_config_schema());
    if (!err.empty()) throw ValidationError("config: " + err);

    RunConfig cfg;
    cfg.seed = doc.value("seed", static_cast<std::uint64_t>(1));
    if (doc.contains("prior")) {
        const json& prior = doc["prior"];
        if (prior.contains("alpha")) cfg.alpha_shares = prior["alpha"].get<Vector>();
        if (prior.contains("psi") && prior["psi"].is_array())
            cfg.psi = parse_matrix(prior["psi"], "config /prior/psi");
        if (prior.contains("psi_p") && prior["psi_p"].is_array())
            cfg.psi_p = parse_matrix(prior["psi_p"], "config /prior/psi_p");
        cfg.nu = prior.value("nu", 5.0);
        cfg.nu_p = prior.value("nu_p", 5.0);
    }
    if (doc.contains("gibbs")) {
        const json& g = doc["gibbs"];
        cfg.gibbs.n_chains = g.value("n_chains", 4);
        cfg.gibbs.burn_in = g.value("burn_in", 1000);
        cfg.gibbs.thin = g.value("thin", 10);
        cfg.gibbs.max_iters = g.value("max_iters", 50000);
        cfg.gibbs.gr_threshold = g.value("gr_threshold", 1.1);
        cfg.gibbs.n_samples = g.value("samples", 2000);
        cfg.gibbs.check_interval = g.value("check_interval", 500);
    }
    if (doc.contains("policy")) {
        const json& p = doc["policy"];
        cfg.mode = p.value("mode", "election");
        cfg.election.min_counted_frac = p.value("min_counted_frac", 0.50);
        cfg.election.confidence = p.value("confidence", 0.995);
        cfg.election.margin_frac_of_remaining = p.value("margin_frac_of_remaining", 0.05);
        cfg.election.collate_top_two = p.value("collate_top_two", true);
        cfg.election.lower_quantile = p.value("lower_quantile", 0.05);
        const std::string summary = p.value("margin_summary", "mean");
        cfg.election.margin_summary = summary == "median"
                                          ? MarginSummaryKind::median
                                          : (summary == "lower_quantile"
                                                 ? MarginSummaryKind::lower_quantile
                                                 : MarginSummaryKind::mean);
        cfg.share.min_rounds = p.value("min_rounds", 5);
        cfg.share.confidence = p.value("confidence", 0.995);
        cfg.share.margin_of_error = p.value("margin_of_error", 0.005);
        cfg.share.category = p.value("category", 0);
    }
    if (doc.contains("schedule")) {
        const json& s = doc["schedule"];
        if (s.value("source", "average_of_observed") == std::string("known"))
            cfg.schedule_source = FutureSchedule::Source::known;
        if (s.contains("horizon")) cfg.horizon = s["horizon"].get<int>();
    }
    cfg.n_sims = doc.value("n_sims", 4000);
    cfg.vst_a = doc.value("vst_a", kDefaultVstA);
    cfg.gibbs.vst_a = cfg.vst_a;

    if (doc.contains("dgp")) {
        const json& d = doc["dgp"];
        DgpSpec spec;
        const std::string kind = d["kind"].get<std::string>();
        spec.kind = kind == "DGP1" ? DgpKind::DGP1 : (kind == "DGP2" ? DgpKind::DGP2 : DgpKind::DGP3);
        spec.C = d.value("C", 3);
        spec.K = d.value("K", 25);
        spec.n = d.value("n", static_cast<long long>(1000));
        if (d.contains("p")) {
            const json& p = d["p"];
            if (p.is_string()) {
                spec.p_source = PSource::dirichlet();
            } else if (p.is_array()) {
                spec.p_source = PSource::fixed(p.get<Vector>());
            } else {
                spec.p_source = PSource::delta_gap(p["delta_gap"].get<double>());
            }
        }
        spec.p_source.dirichlet_conc = d.value("dirichlet_conc", 1.0);
        spec.poisson_sizes = d.value("poisson_sizes", false);
        spec.eps_cov_power = d.value("eps_cov_power", 0.5);
        if (d.contains("A")) spec.A = SpdMatrix(parse_matrix(d["A"], "config /dgp/A"), "dgp A");
        cfg.dgp = spec;
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config '" + path + "': " + e.what());
    }
    return parse_run_config(doc);
}

HierarchicalPrior RunConfig::make_prior(int fit_categories) const {
    HierarchicalPrior prior = default_prior(fit_categories);
    if (alpha_shares) {
        if (static_cast<int>(alpha_shares->size()) != fit_categories)
            throw ValidationError("config: prior alpha has " +
                                  std::to_string(alpha_shares->size()) + " shares but the fit has " +
                                  std::to_string(fit_categories) + " categories");
        prior = prior_from_shares(*alpha_shares, nu, nu_p);
    } else {
        prior.nu = nu;
        prior.nu_p = nu_p;
    }
    if (psi) {
        if (psi->dim() != fit_categories - 1)
            throw ValidationError("config: psi must be (C-1)-dimensional");
        prior.psi = SpdMatrix(*psi, "config psi");
    }
    if (psi_p) {
        if (psi_p->dim() != fit_categories - 1)
            throw ValidationError("config: psi_p must be (C-1)-dimensional");
        prior.psi_p = SpdMatrix(*psi_p, "config psi_p");
    }
    prior.validate();
    return prior;
}

SequentialConfig RunConfig::make_sequential_config() const {
    SequentialConfig sc;
    sc.gibbs = gibbs;
    sc.gibbs.vst_a = vst_a;
    sc.n_sims = n_sims;
    sc.horizon = horizon;
    sc.schedule_source = schedule_source;
    if (mode == "share") {
        sc.policy = share;
    } else {
        sc.policy = election;
    }
    return sc;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

nlohmann::json fit_report_json(const ChainSet& chains, const RoundsFile& rounds, int upto,
                               std::uint64_t seed) {
    const std::vector<PosteriorDraw> pool = chains.pooled();
    if (pool.empty()) throw ValidationError("fit report: no posterior draws");
    const int p = static_cast<int>(pool.front().mu.size());
    const double m = static_cast<double>(pool.size());

    Vector mu_mean(static_cast<std::size_t>(p), 0.0);
    Matrix sigma_mean(p), sigma_p_mean(p);
    for (const PosteriorDraw& d : pool) {
        mu_mean = mu_mean + d.mu;
        sigma_mean += d.sigma.raw();
        sigma_p_mean += d.sigma_p.raw();
    }
    mu_mean = (1.0 / m) * mu_mean;
    sigma_mean *= 1.0 / m;
    sigma_p_mean *= 1.0 / m;
    Vector mu_sd(static_cast<std::size_t>(p), 0.0);
    for (const PosteriorDraw& d : pool)
        for (int i = 0; i < p; ++i) {
            const double r = d.mu[static_cast<std::size_t>(i)] - mu_mean[static_cast<std::size_t>(i)];
            mu_sd[static_cast<std::size_t>(i)] += r * r;
        }
    for (double& v : mu_sd) v = std::sqrt(v / std::max(1.0, m - 1.0));

    // Implied cell probabilities at the posterior mean of mu (large-n inverse).
    Vector p_implied(static_cast<std::size_t>(p) + 1, 0.0);
    double head = 0.0;
    for (int i = 0; i < p; ++i) {
        const double v =
            std::clamp(0.5 * (1.0 + std::sin(mu_mean[static_cast<std::size_t>(i)])), 0.0, 1.0);
        p_implied[static_cast<std::size_t>(i)] = v;
        head += v;
    }
    p_implied[static_cast<std::size_t>(p)] = std::max(0.0, 1.0 - head);

    json doc;
    doc["converged"] = true;
    doc["seed"] = seed;
    doc["rounds_used"] = upto;
    doc["categories"] = rounds.category_names;
    doc["draws"] = pool.size();
    doc["iterations"] = chains.iterations_run;
    doc["convergence_iteration"] = chains.convergence_iteration;
    doc["rhat"] = chains.rhat_final;
    doc["mu_mean"] = mu_mean;
    doc["mu_sd"] = mu_sd;
    doc["sigma_mean"] = matrix_to_json(sigma_mean);
    doc["sigma_p_mean"] = matrix_to_json(sigma_p_mean);
    doc["p_at_mu_mean"] = p_implied;
    return doc;
}

namespace {

json summary_to_json(const DistributionSummary& s) {
    return json{{"mean", s.mean}, {"lo", s.lo}, {"hi", s.hi}, {"level", s.level}};
}

} // namespace

nlohmann::json decision_report_json(const DecisionTrace& trace, const RoundsFile& rounds,
                                    const std::string& mode, int upto, std::uint64_t seed) {
    json doc;
    doc["mode"] = mode;
    doc["seed"] = seed;
    doc["rounds_used"] = upto;
    doc["categories"] = rounds.category_names;
    doc["first_call_round"] =
        trace.first_call_round ? json(*trace.first_call_round) : json(nullptr);
    if (trace.rounds.empty()) throw ValidationError("decision report: empty trace");
    const RoundDecision* last_converged = nullptr;
    for (const RoundDecision& rd : trace.rounds)
        if (rd.converged) last_converged = &rd;
    if (last_converged == nullptr) throw ValidationError("decision report: no converged round");

    // The reported decision is the first call when one was made, otherwise
    // the verdict at the last converged round.
    const RoundDecision& decisive =
        trace.first_call_round
            ? trace.rounds[static_cast<std::size_t>(*trace.first_call_round - 1)]
            : *last_converged;
    const DecisionOutcome& o = decisive.outcome;
    doc["decision_round"] = decisive.round;
    doc["verdict"] = to_string(o.verdict);
    doc["called_category"] = o.called_category ? json(*o.called_category) : json(nullptr);
    doc["called_category_name"] =
        o.called_category
            ? json(rounds.category_names[static_cast<std::size_t>(*o.called_category)])
            : json(nullptr);
    doc["leader"] = o.leader;
    doc["winner_prob"] = o.winner_prob;
    doc["predicted_margin"] = summary_to_json(o.predicted_margin);
    doc["data_frac_used"] = o.data_frac_used;
    if (o.share_estimate) {
        doc["share"] = json{{"category", o.leader},
                            {"estimate", *o.share_estimate},
                            {"interval", summary_to_json(*o.share_interval)}};
    } else {
        doc["share"] = json(nullptr);
    }
    return doc;
}

nlohmann::json truth_sidecar_json(const Dataset& dataset, const DgpSpec& spec,
                                  std::uint64_t seed) {
    json doc;
    doc["dgp"] = to_string(spec.kind);
    doc["C"] = spec.C;
    doc["K"] = spec.K;
    doc["n"] = spec.n;
    doc["seed"] = seed;
    doc["true_p"] = dataset.true_p;
    doc["A"] = dataset.a_used ? matrix_to_json(dataset.a_used->raw()) : json(nullptr);
    return doc;
}

void write_trace_csv(std::ostream& out, const DecisionTrace& trace, const RoundsFile& rounds) {
    // Plot-ready per-round trace; true_final_margin is the realized final
    // margin over the whole file, constant down the column.
    const std::vector<long long> y = rounds.series.cumulative(rounds.series.rounds());
    long long top = 0, second = 0;
    for (long long v : y) {
        if (v > top) {
            second = top;
            top = v;
        } else if (v > second) {
            second = v;
        }
    }
    const long long true_margin = top - second;

    out << "round,n,cum_n,data_frac,converged,verdict,leader,called_category,winner_prob,"
           "margin_mean,margin_lo,margin_hi,share_mean,share_lo,share_hi,true_final_margin\n";
    for (const RoundDecision& rd : trace.rounds) {
        const Round& r = rounds.series.round(rd.round - 1);
        out << rd.round << ',' << r.n << ',' << rounds.series.cumulative_trials(rd.round) << ',';
        if (!rd.converged) {
            out << ",0,not_converged,,,,,,,,,," << true_margin << '\n';
            continue;
        }
        const DecisionOutcome& o = rd.outcome;
        out << format_double(o.data_frac_used) << ",1," << to_string(o.verdict) << ','
            << o.leader << ',';
        if (o.called_category) out << *o.called_category;
        out << ',' << format_double(o.winner_prob) << ',' << format_double(o.predicted_margin.mean)
            << ',' << format_double(o.predicted_margin.lo) << ','
            << format_double(o.predicted_margin.hi) << ',';
        if (o.share_interval) {
            out << format_double(o.share_interval->mean) << ',' << format_double(o.share_interval->lo)
                << ',' << format_double(o.share_interval->hi);
        } else {
            out << ",,";
        }
        out << ',' << true_margin << '\n';
    }
}

} // namespace seqmult
