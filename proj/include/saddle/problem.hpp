#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "saddle/errors.hpp"
#include "saddle/expr.hpp"
#include "saddle/extended.hpp"
#include "saddle/minimax.hpp"
#include "saddle/space.hpp"

namespace saddle {

struct ProblemOptions {
    std::optional<double> tolerance; // absent: caller applies its default ladder
    std::uint64_t seed = 0;
    bool float_profile = false;

    [[nodiscard]] double tolerance_or_default() const {
        return tolerance.value_or(kDefaultTolerance);
    }
};

// A parsed problem file: two spaces, a payoff, and defaults for analysis.
struct Problem {
    SpacePtr x;
    SpacePtr y;
    BiFunction payoff;
    std::optional<std::string> payoff_expr; // original text when given as an expression
    ProblemOptions options;
    std::string source;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) {
            throw input_error(where + ": unknown key \"" + it.key() + "\"");
        }
    }
}

inline ExtReal json_to_ext(const json& j, const std::string& where) {
    if (j.is_number()) {
        const double v = j.get<double>();
        if (std::isnan(v)) throw input_error(where + ": NaN is not a value");
        return ExtReal(v);
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "+inf") return ExtReal::pos_inf();
        if (s == "-inf") return ExtReal::neg_inf();
        throw input_error(where + ": expected a number, \"+inf\", or \"-inf\", got \"" + s + "\"");
    }
    throw input_error(where + ": expected a number, \"+inf\", or \"-inf\"");
}

inline double json_to_finite(const json& j, const std::string& where) {
    if (!j.is_number()) throw input_error(where + ": expected a finite number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw input_error(where + ": expected a finite number");
    return v;
}

inline SpacePtr parse_space(const json& j, const std::string& where) {
    if (!j.is_object()) throw input_error(where + ": expected an object");
    const bool has_grid = j.contains("grid");
    const bool has_dist = j.contains("dist");
    if (has_grid == has_dist) {
        throw input_error(where + ": give exactly one of \"grid\" or \"dist\"");
    }
    if (has_grid) {
        reject_unknown_keys(j, {"grid"}, where);
        const json& g = j.at("grid");
        if (!g.is_object()) throw input_error(where + "/grid: expected an object");
        reject_unknown_keys(g, {"lower", "upper", "lower_open", "upper_open", "samples"},
                            where + "/grid");
        GridSpec spec;
        if (!g.contains("lower") || !g.contains("upper") || !g.contains("samples")) {
            throw input_error(where + "/grid: needs \"lower\", \"upper\", and \"samples\"");
        }
        spec.lower = json_to_finite(g.at("lower"), where + "/grid/lower");
        spec.upper = json_to_finite(g.at("upper"), where + "/grid/upper");
        if (!g.at("samples").is_number_integer()) {
            throw input_error(where + "/grid/samples: expected an integer");
        }
        spec.samples = g.at("samples").get<int>();
        spec.lower_open = g.value("lower_open", false);
        spec.upper_open = g.value("upper_open", false);
        return build_grid(spec);
    }
    reject_unknown_keys(j, {"points", "dist"}, where);
    const json& d = j.at("dist");
    if (!d.is_array() || d.empty()) {
        throw input_error(where + "/dist: expected a nonempty square array of arrays");
    }
    std::vector<std::vector<double>> table;
    table.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const json& row = d.at(i);
        if (!row.is_array()) {
            throw input_error(where + "/dist: row " + std::to_string(i) + " is not an array");
        }
        std::vector<double> out;
        out.reserve(row.size());
        for (std::size_t k = 0; k < row.size(); ++k) {
            out.push_back(json_to_finite(row.at(k), where + "/dist[" + std::to_string(i) + "][" +
                                                        std::to_string(k) + "]"));
        }
        table.push_back(std::move(out));
    }
    std::vector<std::string> labels;
    if (j.contains("points")) {
        const json& p = j.at("points");
        if (!p.is_array()) throw input_error(where + "/points: expected an array of strings");
        for (const auto& item : p) {
            if (!item.is_string()) {
                throw input_error(where + "/points: expected an array of strings");
            }
            labels.push_back(item.get<std::string>());
        }
    }
    try {
        return validate_metric(std::move(table), std::move(labels));
    } catch (const input_error& e) {
        throw input_error(where + "/dist: " + e.what());
    }
}

inline std::string coord_name(const SpacePtr& space, const char* axis, std::size_t i) {
    std::string name = std::string(axis) + "[" + std::to_string(i) + "]";
    if (space->has_coords()) name += "=" + std::to_string(space->coords()[i]);
    return name;
}

} // namespace detail

// Parses an in-memory problem document. `source` names it in diagnostics.
inline Problem parse_problem_json(const nlohmann::json& j, const std::string& source) {
    using detail::json;
    if (!j.is_object()) throw input_error(source + ": expected a JSON object");
    detail::reject_unknown_keys(j, {"schema", "x", "y", "payoff", "options"}, source);
    if (j.contains("schema")) {
        if (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != 1) {
            throw input_error(source + "/schema: this reader understands schema 1 only");
        }
    }
    if (!j.contains("x")) throw input_error(source + ": missing \"x\" space");
    SpacePtr x = detail::parse_space(j.at("x"), source + "/x");
    SpacePtr y = j.contains("y") ? detail::parse_space(j.at("y"), source + "/y") : x;

    ProblemOptions options;
    if (j.contains("options")) {
        const json& o = j.at("options");
        if (!o.is_object()) throw input_error(source + "/options: expected an object");
        detail::reject_unknown_keys(o, {"tolerance", "seed", "float_profile"},
                                    source + "/options");
        if (o.contains("tolerance")) {
            const double t = detail::json_to_finite(o.at("tolerance"),
                                                    source + "/options/tolerance");
            if (t < 0.0) {
                throw input_error(source + "/options/tolerance: must be >= 0");
            }
            options.tolerance = t;
        }
        if (o.contains("seed")) {
            if (!o.at("seed").is_number_unsigned()) {
                throw input_error(source + "/options/seed: expected a nonnegative integer");
            }
            options.seed = o.at("seed").get<std::uint64_t>();
        }
        if (o.contains("float_profile")) {
            if (!o.at("float_profile").is_boolean()) {
                throw input_error(source + "/options/float_profile: expected a boolean");
            }
            options.float_profile = o.at("float_profile").get<bool>();
        }
    }

    if (!j.contains("payoff")) throw input_error(source + ": missing \"payoff\"");
    const json& pay = j.at("payoff");
    if (!pay.is_object()) throw input_error(source + "/payoff: expected an object");
    detail::reject_unknown_keys(pay, {"table", "expr"}, source + "/payoff");
    const bool has_table = pay.contains("table");
    const bool has_expr = pay.contains("expr");
    if (has_table == has_expr) {
        throw input_error(source + "/payoff: give exactly one of \"table\" or \"expr\"");
    }

    if (has_table) {
        const json& t = pay.at("table");
        if (!t.is_array() || t.size() != x->size()) {
            throw input_error(source + "/payoff/table: expected " + std::to_string(x->size()) +
                              " rows (one per point of x), got " +
                              std::to_string(t.is_array() ? t.size() : 0));
        }
        std::vector<ExtReal> vals;
        vals.reserve(x->size() * y->size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const json& row = t.at(i);
            if (!row.is_array() || row.size() != y->size()) {
                throw input_error(source + "/payoff/table: row " + std::to_string(i) +
                                  " needs " + std::to_string(y->size()) +
                                  " entries (one per point of y)");
            }
            for (std::size_t k = 0; k < row.size(); ++k) {
                vals.push_back(detail::json_to_ext(row.at(k),
                                                   source + "/payoff/table[" + std::to_string(i) +
                                                       "][" + std::to_string(k) + "]"));
            }
        }
        return Problem{x, y, BiFunction(x, y, std::move(vals)), std::nullopt, options, source};
    }

    if (!pay.at("expr").is_string()) {
        throw input_error(source + "/payoff/expr: expected a string");
    }
    const auto text = pay.at("expr").get<std::string>();
    if (!x->has_coords() || !y->has_coords()) {
        throw input_error(source + "/payoff/expr: expression payoffs need grid spaces "
                          "(coordinates) on both axes");
    }
    Expression e = Expression::parse(text, options.float_profile);
    std::vector<ExtReal> vals;
    vals.reserve(x->size() * y->size());
    for (std::size_t i = 0; i < x->size(); ++i) {
        for (std::size_t k = 0; k < y->size(); ++k) {
            const double v = e.eval(x->coords()[i], y->coords()[k]);
            if (!std::isfinite(v)) {
                throw input_error(source + "/payoff/expr: evaluates non-finite at (" +
                                  detail::coord_name(x, "x", i) + ", " +
                                  detail::coord_name(y, "y", k) + ")");
            }
            vals.push_back(ExtReal(v));
        }
    }
    return Problem{x, y, BiFunction(x, y, std::move(vals)), text, options, source};
}

// Reads and parses a problem file.
inline Problem parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open problem file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path + ": " + e.what());
    }
    return parse_problem_json(j, path);
}

// Resolves a point given as a label or a 0-based index.
inline std::size_t resolve_point(const SpacePtr& space, const std::string& token) {
    const auto& labels = space->labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == token) return i;
    }
    std::size_t idx = 0;
    try {
        std::size_t used = 0;
        idx = std::stoul(token, &used);
        if (used != token.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw input_error("\"" + token + "\" is neither a point label nor an index");
    }
    space->check_index(idx);
    return idx;
}

} // namespace saddle
