#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "saddle/extended.hpp"
#include "saddle/minimax.hpp"
#include "saddle/perturb.hpp"
#include "saddle/space.hpp"
#include "saddle/wellposed.hpp"

// Serialization of analysis results. All output is deterministic: nlohmann
// sorts object keys and prints shortest round-trip numbers, infinities
// become the "+inf"/"-inf" sentinels, and nothing time- or path-dependent
// is embedded beyond what the caller passes in.

namespace saddle {

using nlohmann::json;

inline json ext_json(ExtReal v) {
    if (v.is_pos_inf()) return json("+inf");
    if (v.is_neg_inf()) return json("-inf");
    return json(v.value());
}

// Shortest round-trip decimal text for a double; reused by CSV output so
// every sink prints numbers identically.
inline std::string num_str(double v) { return json(v).dump(); }

inline json field_json(const ScalarField& f) {
    json arr = json::array();
    for (std::size_t i = 0; i < f.size(); ++i) arr.push_back(ext_json(f[i]));
    return arr;
}

inline json table_json(const BiFunction& f) {
    json rows = json::array();
    for (std::size_t i = 0; i < f.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < f.cols(); ++j) row.push_back(ext_json(f(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json space_json(const SpacePtr& s) {
    json out;
    out["size"] = s->size();
    if (!s->labels().empty()) out["points"] = s->labels();
    if (s->has_coords()) out["coords"] = s->coords();
    return out;
}

inline json index_pairs_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    json arr = json::array();
    for (const auto& [a, b] : pairs) arr.push_back(json::array({a, b}));
    return arr;
}

inline json summary_json(const MinimaxSummary& s) {
    json out;
    out["v"] = field_json(s.v);
    out["w"] = field_json(s.w);
    out["sup_inf"] = ext_json(s.sup_inf);
    out["inf_sup"] = ext_json(s.inf_sup);
    out["gap"] = s.gap_defined() ? ext_json(*s.gap) : json("undefined");
    out["sup_argset"] = s.sup_argset;
    out["inf_argset"] = s.inf_argset;
    return out;
}

inline json assumptions_json(const AssumptionReport& r) {
    json arr = json::array();
    for (const auto& a : r.items) {
        json item;
        item["id"] = a.id;
        item["holds"] = a.holds;
        item["vacuous"] = a.vacuous;
        item["detail"] = a.detail;
        if (a.witness) item["witness"] = *a.witness;
        arr.push_back(std::move(item));
    }
    return arr;
}

inline json certificate_json(const SaddleCertificate& c) {
    json out;
    out["x0"] = c.x0;
    out["y0"] = c.y0;
    out["value"] = c.value;
    out["valid"] = c.valid;
    out["tolerance"] = c.tol;
    out["checked_row_side"] = c.checked_row_side;
    out["checked_col_side"] = c.checked_col_side;
    if (c.violation) {
        json v;
        v["side"] = c.violation->side == SaddleViolation::Side::RowPlayer ? "row" : "column";
        v["index"] = c.violation->index;
        v["observed"] = ext_json(c.violation->observed);
        v["bound"] = c.violation->bound;
        v["message"] = c.violation->message();
        out["first_violation"] = std::move(v);
    }
    return out;
}

inline json eps_set_json(const EpsSaddleSet& s, std::size_t pair_listing_cap = 1000) {
    json out;
    out["eps"] = s.eps;
    out["sup_inf"] = ext_json(s.sup_inf);
    out["inf_sup"] = ext_json(s.inf_sup);
    out["x_members"] = s.x_members;
    out["y_members"] = s.y_members;
    out["pair_count"] = s.pair_count();
    if (s.pair_count() <= pair_listing_cap) out["pairs"] = index_pairs_json(s.pairs());
    return out;
}

inline json budget_json(const Budget& b) {
    json out;
    out["relation"] = b.relation_text();
    out["bound"] = b.bound;
    out["formula"] = b.formula;
    return out;
}

inline json perturbation_json(const Perturbation& p) {
    json out;
    out["axis"] = axis_name(p.axis);
    out["kind"] = p.kind;
    out["anchor"] = p.anchor;
    out["values"] = field_json(p.field);
    out["norm"] = p.norm;
    out["budget"] = budget_json(p.budget);
    return out;
}

inline json pair_json(const PerturbationPair& p, bool include_combined = true) {
    json out;
    out["on_x"] = perturbation_json(p.on_x);
    out["on_y"] = perturbation_json(p.on_y);
    out["convention"] = "combined = f - on_x(x) + on_y(y)";
    if (include_combined) out["combined"] = table_json(p.combined);
    return out;
}

inline json wellposed_json(const WellposedPerturbation& w, bool include_combined = true) {
    json out;
    out["base"] = pair_json(w.base, include_combined);
    out["sharpener"] = pair_json(w.sharpener, include_combined);
    out["n_terms"] = w.n_terms;
    out["truncation_bound"] = w.truncation_bound;
    out["unique_saddle"] = certificate_json(w.unique_saddle);
    return out;
}

inline json modulus_json(const WellPosednessModulus& m) {
    json out;
    out["eps"] = m.eps;
    out["diameter"] = m.diameter;
    out["pair_counts"] = m.pair_counts;
    if (m.unique_pair) out["unique_pair"] = json::array({m.unique_pair->first,
                                                         m.unique_pair->second});
    out["tolerance"] = m.tol;
    return out;
}

inline json optimizing_json(const OptimizingVerdict& v) {
    json out;
    out["optimizing"] = v.optimizing;
    out["tolerance"] = v.tol;
    if (v.gap) out["gap"] = *v.gap;
    out["step_errors"] = v.step_errors;
    out["envelope"] = v.envelope;
    if (v.first_violation) out["first_violation"] = *v.first_violation;
    if (!v.reason.empty()) out["reason"] = v.reason;
    return out;
}

inline json maximinimizing_json(const MaximinimizingVerdict& v) {
    json out;
    out["maximinimizing"] = v.maximinimizing;
    out["tolerance"] = v.tol;
    out["step_gaps"] = v.step_gaps;
    if (v.first_violation) out["first_violation"] = *v.first_violation;
    if (!v.reason.empty()) out["reason"] = v.reason;
    return out;
}

inline json probe_sample_json(const ProbeSample& s) {
    json out;
    out["origin"] = s.origin;
    out["shift_x"] = field_json(s.shift_x);
    out["shift_y"] = field_json(s.shift_y);
    out["move_norm"] = s.move_norm;
    out["solutions"] = index_pairs_json(s.solutions);
    out["contained"] = s.contained;
    return out;
}

inline json probe_json(const SolutionMapProbe& p) {
    json out;
    out["rho"] = p.options.rho;
    out["trials"] = p.options.trials;
    out["seed"] = p.options.seed;
    out["max_candidates"] = p.options.max_candidates;
    out["tolerance"] = p.options.tol;
    out["target_x"] = p.target_x;
    out["target_y"] = p.target_y;
    out["base_solutions"] = index_pairs_json(p.base_solutions);
    if (p.value_margin) out["value_margin"] = *p.value_margin;
    out["adversary_used"] = p.adversary_used;
    json samples = json::array();
    for (const auto& s : p.samples) samples.push_back(probe_sample_json(s));
    out["samples"] = std::move(samples);
    out["escaped"] = p.escaped;
    if (p.witness) out["witness"] = *p.witness;
    out["convention"] = "probed payoff = f + shift_x(x) + shift_y(y)";
    return out;
}

inline json product_probe_json(const ProductProbe& p) {
    json out;
    out["rho"] = p.options.rho;
    out["trials"] = p.options.trials;
    out["seed"] = p.options.seed;
    out["max_candidates"] = p.options.max_candidates;
    out["tolerance"] = p.options.tol;
    out["target_x"] = p.target_x;
    out["target_y"] = p.target_y;
    out["base_solutions"] = index_pairs_json(p.base_solutions);
    if (p.value_margin) out["value_margin"] = *p.value_margin;
    out["adversary_used"] = p.adversary_used;
    json samples = json::array();
    for (const auto& s : p.samples) {
        json item;
        item["origin"] = s.origin;
        item["shift"] = table_json(s.shift);
        item["move_norm"] = s.move_norm;
        item["solutions"] = index_pairs_json(s.solutions);
        item["contained"] = s.contained;
        samples.push_back(std::move(item));
    }
    out["samples"] = std::move(samples);
    out["escaped"] = p.escaped;
    if (p.witness) out["witness"] = *p.witness;
    out["convention"] = "probed payoff = f + shift(x,y)";
    return out;
}

inline json counterexample_json(const CounterexampleReport& r, std::size_t table_cap = 32) {
    json out;
    out["samples"] = r.samples;
    out["x"] = space_json(r.payoff.space_x());
    out["y"] = space_json(r.payoff.space_y());
    out["summary"] = summary_json(r.summary);
    out["saddle"] = certificate_json(r.saddle);
    out["saddle_count"] = r.saddle_count;
    out["saddle_coords"] = json::array({r.saddle_coords.first, r.saddle_coords.second});
    out["distance_to_corner"] = r.distance_to_corner;
    if (r.payoff.rows() <= table_cap) out["payoff"] = table_json(r.payoff);
    return out;
}

inline json dense_json(const DenseSeparableResult& r, bool include_combined = true) {
    json out;
    out["k"] = field_json(r.k);
    out["r"] = field_json(r.r);
    out["correction_x"] = perturbation_json(r.correction_x);
    out["correction_y"] = perturbation_json(r.correction_y);
    out["x_star"] = r.x_star;
    out["y_star"] = r.y_star;
    out["deviation_x"] = r.deviation_x;
    out["deviation_y"] = r.deviation_y;
    out["saddle_points"] = index_pairs_json(r.saddle_points);
    if (include_combined) out["combined"] = table_json(r.combined);
    return out;
}

inline json local_base_json(const LocalBaseFamily& f) {
    json out;
    out["gauge"] = field_json(f.gauge);
    out["eps"] = f.eps;
    json sets = json::array();
    for (const auto& level : f.sets) sets.push_back(level);
    out["sets"] = std::move(sets);
    return out;
}

// The top-level document every command emits.
inline json report_envelope(const std::string& command, const std::string& problem_source,
                            double tolerance, json result, std::vector<std::string> transcript) {
    json out;
    out["schema"] = 1;
    out["command"] = command;
    if (!problem_source.empty()) out["problem"] = problem_source;
    out["tolerance"] = tolerance;
    out["result"] = std::move(result);
    out["transcript"] = std::move(transcript);
    return out;
}

// A deterministic CSV table: named columns of numbers, shortest round-trip
// formatting, LF line endings.
inline std::string curve_csv(const std::vector<std::pair<std::string,
                                                         std::vector<double>>>& columns) {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ",";
        out += columns[c].first;
    }
    out += "\n";
    std::size_t rows = 0;
    for (const auto& col : columns) rows = std::max(rows, col.second.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ",";
            if (r < columns[c].second.size()) out += num_str(columns[c].second[r]);
        }
        out += "\n";
    }
    return out;
}

} // namespace saddle
