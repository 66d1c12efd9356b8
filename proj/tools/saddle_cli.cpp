// saddle: command-line front end for minimax analysis and perturbation
// synthesis on finite metric spaces.
//
// Exit codes: 0 success (including negative verdicts such as "not a
// saddle" or "escaped"), 1 malformed input, 2 mathematical preconditions
// not met, 3 a synthesized object failed its own verification.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "saddle/saddle.hpp"

namespace {

using nlohmann::json;
using namespace saddle;

struct CommonOpts {
    std::string problem_path;
    std::optional<double> tol_flag;
    std::string out_path;
    std::string md_path;
    std::string csv_path;
    std::string verify = "exhaustive";
};

double resolve_tolerance(const std::optional<double>& flag,
                         const std::optional<double>& file_opt) {
    if (flag) {
        if (*flag < 0.0) throw input_error("--tol must be >= 0");
        return *flag;
    }
    if (const char* env = std::getenv("SADDLE_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v >= 0.0) || !std::isfinite(v)) {
            throw input_error("SADDLE_TOL must be a finite number >= 0, got \"" +
                              std::string(env) + "\"");
        }
        return v;
    }
    if (file_opt) return *file_opt;
    return kDefaultTolerance;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::pair<std::size_t, std::size_t> resolve_pair(const Problem& p, const std::string& at) {
    const auto comma = at.find(',');
    if (comma == std::string::npos) {
        throw input_error("--at expects \"X,Y\" (a point on each axis), got \"" + at + "\"");
    }
    return {resolve_point(p.x, at.substr(0, comma)), resolve_point(p.y, at.substr(comma + 1))};
}

std::vector<std::size_t> resolve_point_list(const SpacePtr& space, const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& tok : split_commas(text)) out.push_back(resolve_point(space, tok));
    return out;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split_commas(text)) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') {
            throw input_error(what + ": \"" + tok + "\" is not a number");
        }
        out.push_back(v);
    }
    return out;
}

std::string point_pair_name(const Problem& p, std::size_t x, std::size_t y) {
    return "(" + p.x->point_name(x) + "," + p.y->point_name(y) + ")";
}

std::string markdown_digest(const json& rep) {
    std::ostringstream md;
    md << "# saddle " << rep.at("command").get<std::string>() << "\n\n";
    if (rep.contains("problem")) {
        md << "- problem: `" << rep.at("problem").get<std::string>() << "`\n";
    }
    md << "- tolerance: " << rep.at("tolerance").dump() << "\n\n";
    md << "## Transcript\n\n";
    for (const auto& line : rep.at("transcript")) {
        md << "- " << line.get<std::string>() << "\n";
    }
    return md.str();
}

void emit(const json& rep, const CommonOpts& common, const std::string& csv_text = "") {
    const std::string text = rep.dump(2) + "\n";
    if (common.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(common.out_path);
        if (!out) throw input_error("cannot write " + common.out_path);
        out << text;
    }
    if (!common.md_path.empty()) {
        std::ofstream md(common.md_path);
        if (!md) throw input_error("cannot write " + common.md_path);
        md << markdown_digest(rep);
    }
    if (!common.csv_path.empty()) {
        if (csv_text.empty()) {
            throw input_error("--csv is not available for this command");
        }
        std::ofstream csv(common.csv_path);
        if (!csv) throw input_error("cannot write " + common.csv_path);
        csv << csv_text;
    }
}

void add_common(CLI::App* sub, CommonOpts& common, bool with_problem = true) {
    if (with_problem) {
        sub->add_option("problem", common.problem_path, "problem file (JSON)")->required();
    }
    sub->add_option("--tol", common.tol_flag,
                    "tolerance for derived comparisons (default: SADDLE_TOL, then the problem "
                    "file, then 1e-12)");
    sub->add_option("--out", common.out_path, "write the JSON report here instead of stdout");
    sub->add_option("--md", common.md_path, "also write a markdown digest here");
    sub->add_option("--csv", common.csv_path, "also write curve data here (wellposed only)");
    sub->add_option("--verify", common.verify, "re-run exhaustive postcondition checks")
        ->check(CLI::IsMember({"exhaustive", "none"}))
        ->capture_default_str();
}

// ---------------------------------------------------------------- analyze

void run_analyze(const CommonOpts& common) {
    const Problem p = parse_problem(common.problem_path);
    const double tol = resolve_tolerance(common.tol_flag, p.options.tolerance);
    const MinimaxSummary s = summarize(p.payoff);
    const AssumptionReport assumptions = check_assumptions(p.payoff);
    const std::vector<SaddleCertificate> saddles = enumerate_saddles(p.payoff, tol);

    std::vector<std::string> transcript;
    transcript.push_back("sup-inf V = " + ext_json(s.sup_inf).dump() + ", inf-sup W = " +
                         ext_json(s.inf_sup).dump() + ", gap = " +
                         (s.gap_defined() ? ext_json(*s.gap).dump() : std::string("undefined")));
    for (const auto& a : assumptions.items) {
        transcript.push_back("hypothesis " + a.id + (a.holds ? " holds" : " FAILS") +
                             (a.vacuous ? " (vacuous here)" : "") + ": " + a.detail);
    }
    transcript.push_back(std::to_string(saddles.size()) + " saddle point(s) at tolerance " +
                         num_str(tol));
    if (common.verify == "exhaustive") {
        for (const auto& c : saddles) {
            const SaddleCertificate again = is_saddle(p.payoff, c.x0, c.y0, tol);
            if (!again.valid) {
                throw verification_error("re-verification lost a saddle certificate");
            }
        }
        transcript.push_back("re-verified all certificates with the exhaustive two-sided check");
    }

    json result;
    result["x"] = space_json(p.x);
    result["y"] = space_json(p.y);
    if (p.payoff_expr) result["payoff_expr"] = *p.payoff_expr;
    result["summary"] = summary_json(s);
    result["assumptions"] = assumptions_json(assumptions);
    json sj = json::array();
    for (const auto& c : saddles) sj.push_back(certificate_json(c));
    result["saddles"] = std::move(sj);
    emit(report_envelope("analyze", p.source, tol, std::move(result), std::move(transcript)),
         common);
}

// ------------------------------------------------------------ saddle-check

void run_saddle_check(const CommonOpts& common, const std::string& at) {
    const Problem p = parse_problem(common.problem_path);
    const double tol = resolve_tolerance(common.tol_flag, p.options.tolerance);
    const auto [x0, y0] = resolve_pair(p, at);
    const SaddleCertificate cert = is_saddle(p.payoff, x0, y0, tol);

    std::vector<std::string> transcript;
    transcript.push_back("checked " + std::to_string(cert.checked_row_side) + " row-side and " +
                         std::to_string(cert.checked_col_side) + " column-side comparisons at " +
                         point_pair_name(p, x0, y0));
    transcript.push_back(cert.valid
                             ? "saddle point confirmed with value " + num_str(cert.value)
                             : "not a saddle point: " + cert.violation->message());

    json result;
    result["certificate"] = certificate_json(cert);
    emit(report_envelope("saddle-check", p.source, tol, std::move(result), std::move(transcript)),
         common);
}

// -------------------------------------------------------------- eps-saddle

void run_eps_saddle(const CommonOpts& common, double eps) {
    const Problem p = parse_problem(common.problem_path);
    const double tol = resolve_tolerance(common.tol_flag, p.options.tolerance);
    const EpsSaddleSet set = eps_saddle_set(p.payoff, eps, tol);

    std::vector<std::string> transcript;
    transcript.push_back("eps = " + num_str(eps) + ": " +
                         std::to_string(set.x_members.size()) + " x-member(s) x " +
                         std::to_string(set.y_members.size()) + " y-member(s) = " +
                         std::to_string(set.pair_count()) + " pair(s)");
    json result;
    result["set"] = eps_set_json(set);
    emit(report_envelope("eps-saddle", p.source, tol, std::move(result), std::move(transcript)),
         common);
}

// ----------------------------------------------------------------- perturb

struct PerturbOpts {
    std::string mode;
    std::string axis = "y";
    std::string at;
    std::optional<double> eps, eps1, eps2, delta;
    int n_terms = 53;
};

double need(const std::optional<double>& v, const char* flag, const char* mode) {
    if (!v) {
        throw input_error(std::string(flag) + " is required for --mode " + mode);
    }
    return *v;
}

// One-axis modes operate on the problem's marginals: axis y perturbs the
// upper envelope w (a genuine minimization); axis x perturbs -v, which
// realizes max-attainment for the lower envelope v.
ScalarField marginal_source(const Problem& p, const MinimaxSummary& s, Axis axis) {
    if (axis == Axis::Y) return s.w;
    std::vector<ExtReal> neg(s.v.size());
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        neg[i] = s.v[i].is_neg_inf()
                     ? ExtReal::pos_inf()
                     : (s.v[i].is_pos_inf() ? ExtReal::neg_inf() : ExtReal(-s.v[i].value()));
    }
    return ScalarField(p.x, std::move(neg));
}

void run_perturb(const CommonOpts& common, const PerturbOpts& opt) {
    const Problem p = parse_problem(common.problem_path);
    const double tol = resolve_tolerance(common.tol_flag, p.options.tolerance);
    const bool exhaustive = common.verify == "exhaustive";
    std::vector<std::string> transcript;
    json result;
    const bool small = p.payoff.rows() * p.payoff.cols() <= 4096;

    auto describe = [&](const Perturbation& q) {
        transcript.push_back(std::string("on_") + axis_name(q.axis) + " [" + q.kind + "] norm " +
                             num_str(q.norm) + " " + q.budget.relation_text() + " " +
                             num_str(q.budget.bound) + " (" + q.budget.formula + "), anchored at " +
                             (q.axis == Axis::X ? p.x->point_name(q.anchor)
                                                : p.y->point_name(q.anchor)));
    };

    if (opt.mode == "min" || opt.mode == "strong-min") {
        const Axis axis = opt.axis == "x" ? Axis::X : Axis::Y;
        const SpacePtr& space = axis == Axis::X ? p.x : p.y;
        const std::size_t anchor = resolve_point(space, opt.at);
        const MinimaxSummary s = summarize(p.payoff);
        const ScalarField source = marginal_source(p, s, axis);
        transcript.push_back(axis == Axis::Y
                                 ? "source: upper envelope w on y"
                                 : "source: negated lower envelope -v on x (max-attainment)");
        const Perturbation q =
            opt.mode == "min"
                ? kr_min_perturbation(source, anchor, axis, tol)
                : kr_strong_min_perturbation(source, anchor,
                                             need(opt.eps, "--eps", opt.mode.c_str()), axis, tol);
        describe(q);
        std::vector<ExtReal> lifted(source.size());
        for (std::size_t i = 0; i < source.size(); ++i) {
            lifted[i] = ext_shift(source[i], q.field[i].value());
        }
        const ScalarField after(space, std::move(lifted));
        if (exhaustive) {
            const auto mins = after.argmin_set();
            transcript.push_back("re-verified: perturbed marginal attains its minimum on {" +
                                 [&] {
                                     std::string t;
                                     for (std::size_t m : mins) {
                                         if (!t.empty()) t += ",";
                                         t += space->point_name(m);
                                     }
                                     return t;
                                 }() + "}");
        }
        result["perturbation"] = perturbation_json(q);
        result["source_marginal"] = field_json(source);
        result["perturbed_marginal"] = field_json(after);
    } else if (opt.mode == "supinf" || opt.mode == "infsup") {
        const auto [x0, y0] = resolve_pair(p, opt.at);
        const double eps = need(opt.eps, "--eps", opt.mode.c_str());
        const double delta = need(opt.delta, "--delta", opt.mode.c_str());
        const PerturbationPair pair = opt.mode == "supinf"
                                          ? supinf_perturbation(p.payoff, x0, y0, eps, delta, tol)
                                          : infsup_perturbation(p.payoff, x0, y0, eps, delta, tol);
        describe(pair.on_x);
        describe(pair.on_y);
        const MinimaxSummary cs = summarize(pair.combined);
        transcript.push_back(opt.mode == "supinf"
                                 ? "perturbed sup-inf value = " + ext_json(cs.sup_inf).dump() +
                                       ", attained at " + p.x->point_name(x0)
                                 : "perturbed inf-sup value = " + ext_json(cs.inf_sup).dump() +
                                       ", attained at " + p.y->point_name(y0));
        result["pair"] = pair_json(pair, small);
    } else if (opt.mode == "saddle" || opt.mode == "eps-saddle") {
        const auto [x0, y0] = resolve_pair(p, opt.at);
        PerturbationPair pair = [&] {
            if (opt.mode == "saddle") {
                return saddle_perturbation(p.payoff, x0, y0,
                                           need(opt.eps1, "--eps1", "saddle"),
                                           need(opt.eps2, "--eps2", "saddle"), tol);
            }
            return eps_saddle_perturbation(p.payoff, x0, y0, need(opt.eps, "--eps", "eps-saddle"),
                                           tol);
        }();
        describe(pair.on_x);
        describe(pair.on_y);
        SaddleCertificate cert = is_saddle(pair.combined, x0, y0, tol);
        transcript.push_back("two-sided saddle check at " + point_pair_name(p, x0, y0) + ": " +
                             (cert.valid ? "valid, value " + num_str(cert.value)
                                         : "INVALID: " + cert.violation->message()));
        if (!cert.valid) {
            throw verification_error("synthesized pair lost its saddle on re-check");
        }
        if (exhaustive) {
            const auto all = enumerate_saddles(pair.combined, tol);
            transcript.push_back("re-verified: perturbed payoff has " +
                                 std::to_string(all.size()) + " saddle point(s)");
        }
        result["pair"] = pair_json(pair, small);
        result["certificate"] = certificate_json(cert);
    } else if (opt.mode == "wellposed") {
        const auto [x0, y0] = resolve_pair(p, opt.at);
        const WellposedPerturbation wp = wellposed_perturbation(
            p.payoff, x0, y0, need(opt.eps1, "--eps1", "wellposed"),
            need(opt.eps2, "--eps2", "wellposed"), need(opt.delta, "--delta", "wellposed"),
            opt.n_terms, tol);
        describe(wp.base.on_x);
        describe(wp.base.on_y);
        describe(wp.sharpener.on_x);
        describe(wp.sharpener.on_y);
        transcript.push_back("unique saddle at " + point_pair_name(p, x0, y0) + " with value " +
                             num_str(wp.unique_saddle.value) + "; truncation bound " +
                             num_str(wp.truncation_bound) + " after " +
                             std::to_string(wp.n_terms) + " reference terms");
        if (exhaustive) {
            const auto all = enumerate_saddles(wp.sharpener.combined, tol);
            if (all.size() != 1) {
                throw verification_error("re-verification found a non-unique saddle");
            }
            transcript.push_back("re-verified: exactly one saddle in the sharpened payoff");
        }
        result["wellposed"] = wellposed_json(wp, small);
    } else {
        throw input_error("unknown --mode \"" + opt.mode + "\"");
    }
    emit(report_envelope("perturb", p.source, tol, std::move(result), std::move(transcript)),
         common);
}

// --------------------------------------------------------------- wellposed

void run_wellposed(const CommonOpts& common, const std::string& grid_text) {
    const Problem p = parse_problem(common.problem_path);
    const double tol = resolve_tolerance(common.tol_flag, p.options.tolerance);
    const std::vector<double> grid = parse_number_list(grid_text, "--eps-grid");
    const WellPosednessModulus m = modulus(p.payoff, grid, tol);

    std::vector<std::string> transcript;
    for (std::size_t i = 0; i < m.eps.size(); ++i) {
        transcript.push_back("eps = " + num_str(m.eps[i]) + ": diameter " +
                             num_str(m.diameter[i]) + " over " +
                             std::to_string(m.pair_counts[i]) + " pair(s)");
    }
    transcript.push_back(m.unique_pair
                             ? "limit set is the single pair " +
                                   point_pair_name(p, m.unique_pair->first, m.unique_pair->second)
                             : "limit set is not a single pair at the smallest eps");

    std::string csv = "eps,diameter,pair_count\n";
    for (std::size_t i = 0; i < m.eps.size(); ++i) {
        csv += saddle::finite_to_string(m.eps[i]) + "," + saddle::finite_to_string(m.diameter[i]) +
               "," + std::to_string(m.pair_counts[i]) + "\n";
    }
    json result;
    result["modulus"] = modulus_json(m);
    emit(report_envelope("wellposed", p.source, tol, std::move(result), std::move(transcript)),
         common, csv);
}

// --------------------------------------------------------------- probe-usc

struct ProbeOpts {
    double rho = 0.125;
    int trials = 16;
    std::optional<std::uint64_t> seed;
    int max_candidates = 64;
    std::string target_x, target_y;
    std::string center_x, center_y;
    bool joint = false;
};

void run_probe(const CommonOpts& common, const ProbeOpts& opt) {
    const Problem p = parse_problem(common.problem_path);
    const double tol = resolve_tolerance(common.tol_flag, p.options.tolerance);

    auto center_field = [&](const SpacePtr& space, const std::string& text, const char* flag) {
        if (text.empty()) return ScalarField::constant(space, ExtReal(0.0));
        const auto nums = parse_number_list(text, flag);
        if (nums.size() != space->size()) {
            throw input_error(std::string(flag) + ": expected " + std::to_string(space->size()) +
                              " values");
        }
        std::vector<ExtReal> vals(nums.size());
        for (std::size_t i = 0; i < nums.size(); ++i) vals[i] = ExtReal(nums[i]);
        return ScalarField(space, std::move(vals));
    };
    const ScalarField s = center_field(p.x, opt.center_x, "--center-x");
    const ScalarField u = center_field(p.y, opt.center_y, "--center-y");

    ProbeOptions po;
    po.rho = opt.rho;
    po.trials = opt.trials;
    po.seed = opt.seed.value_or(p.options.seed);
    po.max_candidates = opt.max_candidates;
    po.tol = tol;

    // Default target box: the base solution set itself.
    std::vector<std::size_t> tx, ty;
    if (opt.target_x.empty() || opt.target_y.empty()) {
        const auto base = solution_map(p.payoff, s, u, tol);
        if (base.empty()) {
            throw precondition_error("the center shift has an empty solution set; pass explicit "
                                     "--target-x/--target-y to probe anyway");
        }
        for (const auto& c : base) {
            tx.push_back(c.x0);
            ty.push_back(c.y0);
        }
    }
    if (!opt.target_x.empty()) tx = resolve_point_list(p.x, opt.target_x);
    if (!opt.target_y.empty()) ty = resolve_point_list(p.y, opt.target_y);

    std::vector<std::string> transcript;
    json result;
    if (!opt.joint) {
        const SolutionMapProbe probe = usc_adversary_probe(p.payoff, s, u, tx, ty, po);
        transcript.push_back("base solution set has " +
                             std::to_string(probe.base_solutions.size()) + " point(s)");
        if (probe.value_margin) {
            transcript.push_back("unique base solution with value margin " +
                                 num_str(*probe.value_margin));
        }
        transcript.push_back(probe.adversary_used
                                 ? "adversary synthesized relocations from the eps-saddle set"
                                 : "adversary unavailable (nonzero gap or disabled); random "
                                   "sampling only");
        transcript.push_back(std::to_string(probe.samples.size()) + " sample(s) probed");
        transcript.push_back(probe.escaped
                                 ? "verdict: ESCAPED at sample " + std::to_string(*probe.witness)
                                 : "verdict: contained (no probed shift moved solutions out)");
        if (common.verify == "exhaustive" && probe.escaped) {
            const auto& w = probe.samples[*probe.witness];
            const auto replay = solution_map(p.payoff, w.shift_x, w.shift_y, tol);
            bool outside = false;
            for (const auto& c : replay) {
                bool in_x = false, in_y = false;
                for (std::size_t i : probe.target_x) in_x = in_x || i == c.x0;
                for (std::size_t j : probe.target_y) in_y = in_y || j == c.y0;
                outside = outside || !(in_x && in_y);
            }
            if (!outside) throw verification_error("escape witness failed its replay");
            transcript.push_back("re-verified: witness shift relocates solutions outside the "
                                 "target box");
        }
        result["probe"] = probe_json(probe);
    } else {
        std::vector<ExtReal> zvals;
        zvals.reserve(p.payoff.rows() * p.payoff.cols());
        for (std::size_t i = 0; i < p.payoff.rows(); ++i) {
            for (std::size_t j = 0; j < p.payoff.cols(); ++j) {
                zvals.push_back(ExtReal(s[i].value() + u[j].value()));
            }
        }
        const BiFunction z(p.x, p.y, std::move(zvals));
        const ProductProbe probe = product_usc_probe(p.payoff, z, tx, ty, po);
        transcript.push_back("joint probe; base solution set has " +
                             std::to_string(probe.base_solutions.size()) + " point(s)");
        transcript.push_back(std::to_string(probe.samples.size()) + " sample(s) probed");
        transcript.push_back(probe.escaped
                                 ? "verdict: ESCAPED at sample " + std::to_string(*probe.witness)
                                 : "verdict: contained (no probed shift moved solutions out)");
        result["probe"] = product_probe_json(probe);
    }
    emit(report_envelope("probe-usc", p.source, tol, std::move(result), std::move(transcript)),
         common);
}

// ----------------------------------------------------------- counterexample

void run_counterexample(const CommonOpts& common, int n) {
    const double tol = resolve_tolerance(common.tol_flag, std::nullopt);
    const CounterexampleReport rep = discretized_counterexample(n);

    std::vector<std::string> transcript;
    transcript.push_back("grid " + std::to_string(n) + " x " + std::to_string(n) +
                         " over (0,1) x (0,1]: gap = " +
                         ext_json(*rep.summary.gap).dump());
    transcript.push_back("grid saddle at (" + num_str(rep.saddle_coords.first) + ", " +
                         num_str(rep.saddle_coords.second) + "), value " +
                         num_str(rep.saddle.value));
    transcript.push_back("product max-metric distance to the excluded corner (1,1): " +
                         num_str(rep.distance_to_corner));
    transcript.push_back("the distance stays bounded away from 0 as the grid refines; the "
                         "continuous problem has no saddle");
    if (common.verify == "exhaustive") {
        const SaddleCertificate again = is_saddle(rep.payoff, rep.saddle.x0, rep.saddle.y0, 0.0);
        if (!again.valid) throw verification_error("counterexample saddle failed its re-check");
        transcript.push_back("re-verified the grid saddle exhaustively at zero tolerance");
    }

    emit(report_envelope("counterexample", "", tol, counterexample_json(rep),
                         std::move(transcript)),
         common);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimax structure and perturbation synthesis on finite metric spaces"};
    app.require_subcommand(1);

    CommonOpts c_analyze, c_check, c_eps, c_perturb, c_wellposed, c_probe, c_counter;

    CLI::App* analyze = app.add_subcommand("analyze", "marginals, gap, hypotheses, saddles");
    add_common(analyze, c_analyze);

    CLI::App* check = app.add_subcommand("saddle-check", "two-sided saddle check at a pair");
    add_common(check, c_check);
    std::string check_at;
    check->add_option("--at", check_at, "point pair \"X,Y\" (labels or indices)")->required();

    CLI::App* eps_cmd = app.add_subcommand("eps-saddle", "the eps-approximate saddle set");
    add_common(eps_cmd, c_eps);
    double eps_value = 0.0;
    eps_cmd->add_option("--eps", eps_value, "eps > 0")->required();

    CLI::App* perturb = app.add_subcommand("perturb", "synthesize a verified perturbation");
    add_common(perturb, c_perturb);
    PerturbOpts popt;
    perturb->add_option("--mode", popt.mode,
                        "min | strong-min | supinf | infsup | saddle | eps-saddle | wellposed")
        ->required()
        ->check(CLI::IsMember({"min", "strong-min", "supinf", "infsup", "saddle", "eps-saddle",
                               "wellposed"}));
    perturb->add_option("--axis", popt.axis, "axis for one-axis modes (default y)")
        ->check(CLI::IsMember({"x", "y"}));
    perturb->add_option("--at", popt.at,
                        "anchor: \"X,Y\" for two-axis modes, a single point for min/strong-min")
        ->required();
    perturb->add_option("--eps", popt.eps, "slack for strong-min / supinf / infsup / eps-saddle");
    perturb->add_option("--eps1", popt.eps1, "sup-side slack for saddle / wellposed");
    perturb->add_option("--eps2", popt.eps2, "inf-side slack for saddle / wellposed");
    perturb->add_option("--delta", popt.delta, "second slack (supinf/infsup) or sharpener "
                                               "amplitude (wellposed)");
    perturb->add_option("--n-terms", popt.n_terms, "reference partial-sum length (wellposed)")
        ->capture_default_str();

    CLI::App* wellposed = app.add_subcommand("wellposed", "eps-saddle diameter modulus");
    add_common(wellposed, c_wellposed);
    std::string grid_text = "1e0,1e-1,1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8";
    wellposed->add_option("--eps-grid", grid_text, "comma-separated eps values")
        ->capture_default_str();

    CLI::App* probe = app.add_subcommand("probe-usc",
                                         "stress upper semicontinuity of the solution map");
    add_common(probe, c_probe);
    ProbeOpts pr;
    probe->add_option("--rho", pr.rho, "probe radius")->required();
    probe->add_option("--trials", pr.trials, "random samples")->capture_default_str();
    probe->add_option("--seed", pr.seed, "RNG seed (default: problem options)");
    probe->add_option("--max-candidates", pr.max_candidates, "adversary candidate cap")
        ->capture_default_str();
    probe->add_option("--target-x", pr.target_x, "target box X points (default: base solutions)");
    probe->add_option("--target-y", pr.target_y, "target box Y points (default: base solutions)");
    probe->add_option("--center-x", pr.center_x, "center shift on X (numbers; default zeros)");
    probe->add_option("--center-y", pr.center_y, "center shift on Y (numbers; default zeros)");
    probe->add_flag("--joint", pr.joint, "probe joint perturbations z(x,y) instead");

    CLI::App* counter = app.add_subcommand("counterexample",
                                           "discretized no-saddle instance on (0,1) x (0,1]");
    add_common(counter, c_counter, /*with_problem=*/false);
    int counter_n = 100;
    counter->add_option("--n", counter_n, "samples per axis")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (analyze->parsed()) run_analyze(c_analyze);
        if (check->parsed()) run_saddle_check(c_check, check_at);
        if (eps_cmd->parsed()) run_eps_saddle(c_eps, eps_value);
        if (perturb->parsed()) run_perturb(c_perturb, popt);
        if (wellposed->parsed()) run_wellposed(c_wellposed, grid_text);
        if (probe->parsed()) run_probe(c_probe, pr);
        if (counter->parsed()) run_counterexample(c_counter, counter_n);
    } catch (const input_error& e) {
        std::cerr << "error (input): " << e.what() << "\n";
        return 1;
    } catch (const precondition_error& e) {
        std::cerr << "error (precondition): " << e.what() << "\n";
        return 2;
    } catch (const verification_error& e) {
        std::cerr << "error (verification): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
