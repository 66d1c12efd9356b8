#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/extended.hpp"
#include "saddle/minimax.hpp"
#include "saddle/perturb.hpp"
#include "saddle/space.hpp"

namespace saddle {

// A joint sequence of play: step t visits (x_t, y_t).
struct PairSequence {
    std::vector<std::pair<std::size_t, std::size_t>> steps;
};

// Verdict on whether a sequence drives both marginals to the common value.
struct OptimizingVerdict {
    bool optimizing = false;
    double tol = 0.0;
    std::optional<double> gap;                // duality gap when defined and finite
    std::vector<double> step_errors;          // max(V - v(x_t), w(y_t) - W), +inf allowed
    std::vector<double> envelope;             // suffix maxima of step_errors, nonincreasing
    std::optional<std::size_t> first_violation; // first step with error > tol
    std::string reason;                       // set when not optimizing
};

inline OptimizingVerdict is_optimizing(const BiFunction& f, const PairSequence& seq,
                                       double tol = kDefaultTolerance) {
    if (seq.steps.empty()) throw input_error("sequence is empty");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    for (const auto& [x, y] : seq.steps) {
        f.space_x()->check_index(x);
        f.space_y()->check_index(y);
    }
    const MinimaxSummary s = summarize(f);
    OptimizingVerdict out;
    out.tol = tol;
    if (!s.gap_defined() || !s.gap->is_finite()) {
        out.reason = "duality gap is not finite; no common value to optimize toward";
        return out;
    }
    out.gap = s.gap->value();
    const double sup_inf = s.sup_inf.finite_value();
    const double inf_sup = s.inf_sup.finite_value();
    out.step_errors.reserve(seq.steps.size());
    for (const auto& [x, y] : seq.steps) {
        const double ev = s.v[x].is_finite() ? sup_inf - s.v[x].value()
                                             : std::numeric_limits<double>::infinity();
        const double ew = s.w[y].is_finite() ? s.w[y].value() - inf_sup
                                             : std::numeric_limits<double>::infinity();
        out.step_errors.push_back(std::max(ev, ew));
    }
    out.envelope.assign(out.step_errors.size(), 0.0);
    double running = 0.0;
    for (std::size_t t = out.step_errors.size(); t-- > 0;) {
        running = std::max(running, out.step_errors[t]);
        out.envelope[t] = running;
    }
    for (std::size_t t = 0; t < out.step_errors.size(); ++t) {
        if (out.step_errors[t] > tol) {
            out.first_violation = t;
            break;
        }
    }
    if (std::fabs(*out.gap) > tol) {
        out.reason = "duality gap " + finite_to_string(*out.gap) + " exceeds tolerance";
        return out;
    }
    if (out.step_errors.back() > tol) {
        out.reason = "final marginal error " + finite_to_string(out.step_errors.back()) +
                     " exceeds tolerance";
        return out;
    }
    out.optimizing = true;
    return out;
}

// Verdict on whether the per-step upper/lower envelope spread closes.
struct MaximinimizingVerdict {
    bool maximinimizing = false;
    double tol = 0.0;
    std::vector<double> step_gaps;            // w(y_t) - v(x_t), +inf allowed
    std::optional<std::size_t> first_violation;
    std::string reason;
};

inline MaximinimizingVerdict is_maximinimizing(const BiFunction& f, const PairSequence& seq,
                                               double tol = kDefaultTolerance) {
    if (seq.steps.empty()) throw input_error("sequence is empty");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    for (const auto& [x, y] : seq.steps) {
        f.space_x()->check_index(x);
        f.space_y()->check_index(y);
    }
    const MinimaxSummary s = summarize(f);
    MaximinimizingVerdict out;
    out.tol = tol;
    out.step_gaps.reserve(seq.steps.size());
    for (const auto& [x, y] : seq.steps) {
        const auto d = ext_sub(s.w[y], s.v[x]);
        out.step_gaps.push_back(d && d->is_finite() ? d->value()
                                                    : std::numeric_limits<double>::infinity());
    }
    for (std::size_t t = 0; t < out.step_gaps.size(); ++t) {
        if (out.step_gaps[t] > tol) {
            out.first_violation = t;
            break;
        }
    }
    if (out.step_gaps.back() > tol) {
        out.reason = "final envelope spread " + finite_to_string(out.step_gaps.back()) +
                     " exceeds tolerance";
        return out;
    }
    out.maximinimizing = true;
    return out;
}

// How fast approximate saddle sets shrink: the product max-metric diameter
// of the eps-saddle set along a decreasing eps grid. A vanishing diameter
// with a singleton limit set is well-posedness in the metric sense.
struct WellPosednessModulus {
    std::vector<double> eps;          // strictly decreasing
    std::vector<double> diameter;     // nonincreasing
    std::vector<std::size_t> pair_counts;
    std::optional<std::pair<std::size_t, std::size_t>> unique_pair; // at the smallest eps
    double tol = 0.0;
};

inline WellPosednessModulus modulus(const BiFunction& f, std::vector<double> eps_grid,
                                    double tol = kDefaultTolerance) {
    if (eps_grid.empty()) throw input_error("eps grid is empty");
    for (double e : eps_grid) {
        if (!(e > 0.0) || !std::isfinite(e)) throw input_error("eps grid values must be > 0");
    }
    std::sort(eps_grid.begin(), eps_grid.end(), std::greater<double>());
    eps_grid.erase(std::unique(eps_grid.begin(), eps_grid.end()), eps_grid.end());
    WellPosednessModulus out;
    out.tol = tol;
    for (double e : eps_grid) {
        const EpsSaddleSet set = eps_saddle_set(f, e, tol);
        const double dx = f.space_x()->diameter_of(set.x_members);
        const double dy = f.space_y()->diameter_of(set.y_members);
        out.eps.push_back(e);
        out.diameter.push_back(std::max(dx, dy));
        out.pair_counts.push_back(set.pair_count());
        if (e == eps_grid.back() && set.x_members.size() == 1 && set.y_members.size() == 1) {
            out.unique_pair = std::make_pair(set.x_members.front(), set.y_members.front());
        }
    }
    for (std::size_t i = 1; i < out.diameter.size(); ++i) {
        if (out.diameter[i] > out.diameter[i - 1]) {
            throw verification_error("eps-saddle diameters failed to shrink with eps");
        }
    }
    return out;
}

// The solution map: saddle points of f + s(x) + u(y). Additive convention;
// a subtract-convention pair (k, r) enters as s = -k, u = r.
inline std::vector<SaddleCertificate> solution_map(const BiFunction& f, const ScalarField& s,
                                                   const ScalarField& u,
                                                   double tol = kDefaultTolerance) {
    return enumerate_saddles(shifted_payoff(f, s, u), tol);
}

struct ProbeOptions {
    double rho = 0.125;      // perturbation radius
    int trials = 16;         // random samples after the adversary pass
    std::uint64_t seed = 0;
    int max_candidates = 64; // adversary candidates examined (strongest first)
    double tol = kDefaultTolerance;
};

namespace detail {

inline void validate_probe_options(const ProbeOptions& opt) {
    if (!(opt.rho > 0.0) || !std::isfinite(opt.rho)) throw input_error("rho must be > 0");
    if (opt.trials < 0) throw input_error("trials must be >= 0");
    if (opt.max_candidates < 0) throw input_error("max_candidates must be >= 0");
    if (opt.tol < 0.0 || std::isnan(opt.tol)) throw input_error("tolerance must be >= 0");
}

inline std::vector<std::size_t> checked_sorted_set(const SpacePtr& space,
                                                   std::vector<std::size_t> set) {
    if (set.empty()) throw input_error("target set must be nonempty");
    for (std::size_t i : set) space->check_index(i);
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

inline bool in_box(const std::vector<std::size_t>& xs, const std::vector<std::size_t>& ys,
                   std::size_t x, std::size_t y) {
    return std::binary_search(xs.begin(), xs.end(), x) &&
           std::binary_search(ys.begin(), ys.end(), y);
}

inline double unit_draw(std::mt19937_64& rng) {
    return std::ldexp(static_cast<double>(rng() >> 11), -53); // [0,1)
}

inline std::vector<std::pair<std::size_t, std::size_t>> solution_points(
        const std::vector<SaddleCertificate>& certs) {
    std::vector<std::pair<std::size_t, std::size_t>> pts;
    pts.reserve(certs.size());
    for (const auto& c : certs) pts.emplace_back(c.x0, c.y0);
    return pts;
}

// Adversary candidates: eps-saddle pairs outside the target box, strongest
// (farthest from the reference solution in the product max metric) first;
// lexicographic tie-break keeps the order deterministic.
inline std::vector<std::pair<std::size_t, std::size_t>> adversary_candidates(
        const BiFunction& f, const EpsSaddleSet& set, const std::vector<std::size_t>& box_x,
        const std::vector<std::size_t>& box_y, std::pair<std::size_t, std::size_t> ref,
        int max_candidates) {
    std::vector<std::pair<std::size_t, std::size_t>> cands;
    for (std::size_t x : set.x_members) {
        for (std::size_t y : set.y_members) {
            if (!in_box(box_x, box_y, x, y)) cands.emplace_back(x, y);
        }
    }
    auto strength = [&](const std::pair<std::size_t, std::size_t>& c) {
        return std::max(f.space_x()->dist(c.first, ref.first),
                        f.space_y()->dist(c.second, ref.second));
    };
    std::stable_sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
        const double sa = strength(a), sb = strength(b);
        if (sa != sb) return sa > sb;
        return a < b;
    });
    if (cands.size() > static_cast<std::size_t>(max_candidates)) {
        cands.resize(static_cast<std::size_t>(max_candidates));
    }
    return cands;
}

} // namespace detail

// One probed shift of the payoff and where the solution set went.
struct ProbeSample {
    std::string origin;   // "center", "adversary", or "random"
    ScalarField shift_x;  // probed s'
    ScalarField shift_y;  // probed u'
    double move_norm = 0.0; // max(sup|s'-s|, sup|u'-u|)
    std::vector<std::pair<std::size_t, std::size_t>> solutions;
    bool contained = false; // all solutions inside the target box
};

// Outcome of stress-testing upper semicontinuity of the solution map at
// (s, u): does every nearby shift keep its solutions inside the target box?
struct SolutionMapProbe {
    ProbeOptions options;
    std::vector<std::size_t> target_x, target_y;
    std::vector<std::pair<std::size_t, std::size_t>> base_solutions;
    std::optional<double> value_margin; // when the base solution is unique
    bool adversary_used = false;        // relocation synthesis needs a zero gap
    std::vector<ProbeSample> samples;
    bool escaped = false;
    std::optional<std::size_t> witness; // index into samples
};

inline SolutionMapProbe usc_adversary_probe(const BiFunction& f, const ScalarField& s,
                                            const ScalarField& u,
                                            std::vector<std::size_t> target_x,
                                            std::vector<std::size_t> target_y,
                                            const ProbeOptions& options = {}) {
    detail::validate_probe_options(options);
    SolutionMapProbe out;
    out.options = options;
    out.target_x = detail::checked_sorted_set(f.space_x(), std::move(target_x));
    out.target_y = detail::checked_sorted_set(f.space_y(), std::move(target_y));

    const BiFunction center = shifted_payoff(f, s, u);
    const std::vector<SaddleCertificate> base = enumerate_saddles(center, options.tol);
    if (base.empty()) {
        throw precondition_error("the center shift has an empty solution set; semicontinuity "
                                 "at it is vacuous");
    }
    out.base_solutions = detail::solution_points(base);
    if (out.base_solutions.size() == 1) {
        out.value_margin =
            saddle_value_margin(center, out.base_solutions[0].first, out.base_solutions[0].second);
    }

    auto record = [&](std::string origin, ScalarField sx, ScalarField sy, double move) {
        const std::vector<SaddleCertificate> sols =
            solution_map(f, sx, sy, options.tol);
        ProbeSample sample{std::move(origin), std::move(sx), std::move(sy), move,
                           detail::solution_points(sols), true};
        for (const auto& [px, py] : sample.solutions) {
            if (!detail::in_box(out.target_x, out.target_y, px, py)) {
                sample.contained = false;
                break;
            }
        }
        const bool esc = !sample.solutions.empty() && !sample.contained;
        out.samples.push_back(std::move(sample));
        if (esc && !out.escaped) {
            out.escaped = true;
            out.witness = out.samples.size() - 1;
        }
        return esc;
    };

    record("center", s, u, 0.0);

    const MinimaxSummary cs = summarize(center);
    out.adversary_used = cs.gap_zero(options.tol) && options.max_candidates > 0;
    if (out.adversary_used && !out.escaped) {
        const EpsSaddleSet reachable = eps_saddle_set(center, options.rho, options.tol);
        const auto cands = detail::adversary_candidates(center, reachable, out.target_x,
                                                        out.target_y, out.base_solutions.front(),
                                                        options.max_candidates);
        for (const auto& [cx, cy] : cands) {
            const PerturbationPair moved =
                eps_saddle_perturbation(center, cx, cy, options.rho, options.tol);
            std::vector<ExtReal> sx(s.size()), sy(u.size());
            double move = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                sx[i] = ExtReal(s[i].value() - moved.on_x.field[i].value());
                move = std::max(move, std::fabs(sx[i].value() - s[i].value()));
            }
            for (std::size_t j = 0; j < u.size(); ++j) {
                sy[j] = ExtReal(u[j].value() + moved.on_y.field[j].value());
                move = std::max(move, std::fabs(sy[j].value() - u[j].value()));
            }
            if (!(move < options.rho)) continue; // rounding pushed past the radius
            if (record("adversary", ScalarField(f.space_x(), std::move(sx)),
                       ScalarField(f.space_y(), std::move(sy)), move)) {
                break;
            }
        }
    }

    if (!out.escaped && options.trials > 0) {
        std::mt19937_64 rng(options.seed);
        for (int t = 0; t < options.trials; ++t) {
            std::vector<ExtReal> sx(s.size()), sy(u.size());
            double move = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double step = options.rho * (detail::unit_draw(rng) - 0.5);
                sx[i] = ExtReal(s[i].value() + step);
                move = std::max(move, std::fabs(sx[i].value() - s[i].value()));
            }
            for (std::size_t j = 0; j < u.size(); ++j) {
                const double step = options.rho * (detail::unit_draw(rng) - 0.5);
                sy[j] = ExtReal(u[j].value() + step);
                move = std::max(move, std::fabs(sy[j].value() - u[j].value()));
            }
            if (record("random", ScalarField(f.space_x(), std::move(sx)),
                       ScalarField(f.space_y(), std::move(sy)), move)) {
                break;
            }
        }
    }
    return out;
}

// One probed joint perturbation and where the solution set went.
struct ProductProbeSample {
    std::string origin;
    BiFunction shift; // probed z'
    double move_norm = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> solutions;
    bool contained = false;
};

// Joint-perturbation variant: probes f + z' for z' near z. Separable
// adversary moves are reused through their s(x) + u(y) embedding.
struct ProductProbe {
    ProbeOptions options;
    std::vector<std::size_t> target_x, target_y;
    std::vector<std::pair<std::size_t, std::size_t>> base_solutions;
    std::optional<double> value_margin;
    bool adversary_used = false;
    std::vector<ProductProbeSample> samples;
    bool escaped = false;
    std::optional<std::size_t> witness;
};

inline ProductProbe product_usc_probe(const BiFunction& f, const BiFunction& z,
                                      std::vector<std::size_t> target_x,
                                      std::vector<std::size_t> target_y,
                                      const ProbeOptions& options = {}) {
    detail::validate_probe_options(options);
    if (z.space_x() != f.space_x() || z.space_y() != f.space_y()) {
        throw input_error("joint perturbation must live on the payoff's spaces");
    }
    for (const ExtReal v : z.values()) {
        if (!v.is_finite()) throw input_error("joint perturbation must be finite");
    }
    ProductProbe out;
    out.options = options;
    out.target_x = detail::checked_sorted_set(f.space_x(), std::move(target_x));
    out.target_y = detail::checked_sorted_set(f.space_y(), std::move(target_y));

    auto apply = [&](const BiFunction& shift) {
        std::vector<ExtReal> vals;
        vals.reserve(f.rows() * f.cols());
        for (std::size_t i = 0; i < f.rows(); ++i) {
            for (std::size_t j = 0; j < f.cols(); ++j) {
                vals.push_back(ext_shift(f(i, j), shift(i, j).value()));
            }
        }
        return BiFunction(f.space_x(), f.space_y(), std::move(vals));
    };

    const BiFunction center = apply(z);
    const std::vector<SaddleCertificate> base = enumerate_saddles(center, options.tol);
    if (base.empty()) {
        throw precondition_error("the center joint perturbation has an empty solution set; "
                                 "semicontinuity at it is vacuous");
    }
    out.base_solutions = detail::solution_points(base);
    if (out.base_solutions.size() == 1) {
        out.value_margin =
            saddle_value_margin(center, out.base_solutions[0].first, out.base_solutions[0].second);
    }

    auto record = [&](std::string origin, BiFunction shift) {
        double move = 0.0;
        for (std::size_t idx = 0; idx < shift.values().size(); ++idx) {
            move = std::max(move, std::fabs(shift.values()[idx].value() -
                                            z.values()[idx].value()));
        }
        const std::vector<SaddleCertificate> sols = enumerate_saddles(apply(shift), options.tol);
        ProductProbeSample sample{std::move(origin), std::move(shift), move,
                                  detail::solution_points(sols), true};
        for (const auto& [px, py] : sample.solutions) {
            if (!detail::in_box(out.target_x, out.target_y, px, py)) {
                sample.contained = false;
                break;
            }
        }
        const bool esc = !sample.solutions.empty() && !sample.contained;
        out.samples.push_back(std::move(sample));
        if (esc && !out.escaped) {
            out.escaped = true;
            out.witness = out.samples.size() - 1;
        }
        return esc;
    };

    record("center", z);

    const MinimaxSummary cs = summarize(center);
    out.adversary_used = cs.gap_zero(options.tol) && options.max_candidates > 0;
    if (out.adversary_used && !out.escaped) {
        const EpsSaddleSet reachable = eps_saddle_set(center, options.rho, options.tol);
        const auto cands = detail::adversary_candidates(center, reachable, out.target_x,
                                                        out.target_y, out.base_solutions.front(),
                                                        options.max_candidates);
        for (const auto& [cx, cy] : cands) {
            const PerturbationPair moved =
                eps_saddle_perturbation(center, cx, cy, options.rho, options.tol);
            std::vector<ExtReal> vals;
            vals.reserve(z.values().size());
            double move = 0.0;
            for (std::size_t i = 0; i < f.rows(); ++i) {
                for (std::size_t j = 0; j < f.cols(); ++j) {
                    const double moved_entry = (z(i, j).value() - moved.on_x.field[i].value()) +
                                               moved.on_y.field[j].value();
                    move = std::max(move, std::fabs(moved_entry - z(i, j).value()));
                    vals.push_back(ExtReal(moved_entry));
                }
            }
            if (!(move < options.rho)) continue;
            if (record("adversary", BiFunction(f.space_x(), f.space_y(), std::move(vals)))) {
                break;
            }
        }
    }

    if (!out.escaped && options.trials > 0) {
        std::mt19937_64 rng(options.seed);
        for (int t = 0; t < options.trials; ++t) {
            std::vector<ExtReal> vals;
            vals.reserve(z.values().size());
            for (const ExtReal zv : z.values()) {
                vals.push_back(ExtReal(zv.value() +
                                       options.rho * (detail::unit_draw(rng) - 0.5)));
            }
            if (record("random", BiFunction(f.space_x(), f.space_y(), std::move(vals)))) {
                break;
            }
        }
    }
    return out;
}

// Nudges a candidate separable pair (khat, rhat) so that the shifted
// separable payoff f1(x) + f2(y) + k(x) + r(y) has a saddle, moving each
// piece by strictly less than eps. On a finite space optima are attained,
// so the correction is identically zero and the saddle set is the product
// of the optimizer sets.
struct DenseSeparableResult {
    ScalarField k, r;                       // adjusted pair
    Perturbation correction_x, correction_y; // gap-closing corrections (zero here)
    std::size_t x_star = 0, y_star = 0;      // anchors of the corrections
    double deviation_x = 0.0, deviation_y = 0.0; // sup|k - khat|, sup|r - rhat|
    BiFunction combined;                     // f1 + f2 + k + r
    std::vector<std::pair<std::size_t, std::size_t>> saddle_points;
};

inline DenseSeparableResult dense_separable_perturbation(const ScalarField& f1,
                                                         const ScalarField& f2,
                                                         const ScalarField& khat,
                                                         const ScalarField& rhat, double eps,
                                                         double tol = kDefaultTolerance) {
    detail::require_positive_finite(eps, "eps");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    if (khat.space() != f1.space() || rhat.space() != f2.space()) {
        throw input_error("candidate pair must live on the payoff's spaces");
    }
    if (!khat.all_finite() || !rhat.all_finite()) {
        throw input_error("candidate pair must be finite");
    }
    bool f1_bottomless = false, f2_topless = false;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        if (f1[i].is_pos_inf()) {
            throw precondition_error("f1 must stay in R united with -inf");
        }
        f1_bottomless = f1_bottomless || f1[i].is_neg_inf();
    }
    for (std::size_t j = 0; j < f2.size(); ++j) {
        if (f2[j].is_neg_inf()) {
            throw precondition_error("f2 must stay in R united with +inf");
        }
        f2_topless = f2_topless || f2[j].is_pos_inf();
    }
    if (f1_bottomless && f2_topless) {
        throw precondition_error("f1 + f2 is undefined: -inf rows meet +inf columns");
    }

    std::vector<ExtReal> a(f1.size()), b(f2.size());
    for (std::size_t i = 0; i < f1.size(); ++i) a[i] = ext_shift(f1[i], khat[i].value());
    for (std::size_t j = 0; j < f2.size(); ++j) b[j] = ext_shift(f2[j], rhat[j].value());
    const ScalarField lifted_x(f1.space(), a);
    const ScalarField lifted_y(f2.space(), b);
    if (!lifted_x.max_value().is_finite()) {
        throw precondition_error("f1 + khat has no finite supremum; the pair is improper");
    }
    if (!lifted_y.min_value().is_finite()) {
        throw precondition_error("f2 + rhat has no finite infimum; the pair is improper");
    }
    const std::size_t x_star = lifted_x.argmax_set().front();
    const std::size_t y_star = lifted_y.argmin_set().front();

    // Gap-closing corrections; on a finite space the optimum is attained,
    // so both come out identically zero and only certify that fact.
    std::vector<ExtReal> neg(f1.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        neg[i] = lifted_x[i].is_neg_inf() ? ExtReal::pos_inf() : ExtReal(-lifted_x[i].value());
    }
    Perturbation cx = kr_min_perturbation(ScalarField(f1.space(), std::move(neg)), x_star,
                                          Axis::X, tol);
    Perturbation cy = kr_min_perturbation(lifted_y, y_star, Axis::Y, tol);
    cx.kind = "dense-separable-correction";
    cy.kind = "dense-separable-correction";
    if (!(cx.norm < eps) || !(cy.norm < eps)) {
        throw verification_error("dense-separable correction moved by eps or more");
    }

    std::vector<ExtReal> kf(f1.size()), rf(f2.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        kf[i] = ExtReal(khat[i].value() + cx.field[i].value());
    }
    for (std::size_t j = 0; j < f2.size(); ++j) {
        rf[j] = ExtReal(rhat[j].value() + cy.field[j].value());
    }
    ScalarField k(f1.space(), std::move(kf));
    ScalarField r(f2.space(), std::move(rf));

    std::vector<ExtReal> table;
    table.reserve(f1.size() * f2.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const ExtReal row = ext_shift(f1[i], k[i].value());
        for (std::size_t j = 0; j < f2.size(); ++j) {
            const ExtReal col = ext_shift(f2[j], r[j].value());
            if (row.is_neg_inf() || col.is_neg_inf()) {
                table.push_back(ExtReal::neg_inf());
            } else if (row.is_pos_inf() || col.is_pos_inf()) {
                table.push_back(ExtReal::pos_inf());
            } else {
                table.push_back(ExtReal(row.value() + col.value()));
            }
        }
    }
    BiFunction combined(f1.space(), f2.space(), std::move(table));

    std::vector<SaddleCertificate> saddles = enumerate_saddles(combined, tol);
    if (saddles.empty()) {
        throw verification_error("dense-separable adjustment failed to create a saddle");
    }
    bool anchored = false;
    for (const auto& c : saddles) {
        if (c.x0 == x_star && c.y0 == y_star) anchored = true;
    }
    if (!anchored) {
        throw verification_error("dense-separable anchor pair is not among the saddles");
    }
    const double dev_x = cx.norm;
    const double dev_y = cy.norm;
    return DenseSeparableResult{std::move(k),
                                std::move(r),
                                std::move(cx),
                                std::move(cy),
                                x_star,
                                y_star,
                                dev_x,
                                dev_y,
                                std::move(combined),
                                detail::solution_points(saddles)};
}

} // namespace saddle
