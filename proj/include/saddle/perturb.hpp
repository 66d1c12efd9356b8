#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/extended.hpp"
#include "saddle/minimax.hpp"
#include "saddle/space.hpp"

namespace saddle {

enum class Axis { X, Y };

inline const char* axis_name(Axis a) { return a == Axis::X ? "x" : "y"; }

// The guarantee a synthesized perturbation carries for its sup norm, with
// the formula the bound was computed from.
struct Budget {
    enum class Relation { LessThan, AtMost, Equal };

    Relation relation = Relation::AtMost;
    double bound = 0.0;
    std::string formula;

    [[nodiscard]] bool satisfied_by(double norm) const {
        switch (relation) {
        case Relation::LessThan: return norm < bound;
        case Relation::AtMost: return norm <= bound;
        case Relation::Equal: return norm == bound;
        }
        return false;
    }

    [[nodiscard]] const char* relation_text() const {
        switch (relation) {
        case Relation::LessThan: return "<";
        case Relation::AtMost: return "<=";
        case Relation::Equal: return "==";
        }
        return "?";
    }
};

// A one-axis perturbation: finite, nonnegative, zero at its anchor, with a
// verified sup norm and budget.
struct Perturbation {
    Axis axis;
    ScalarField field;
    std::size_t anchor = 0;
    double norm = 0.0;
    Budget budget;
    std::string kind;
};

// Validates every structural invariant and the budget; the only way the
// library builds a Perturbation.
inline Perturbation make_perturbation(Axis axis, ScalarField field, std::size_t anchor,
                                      Budget budget, std::string kind) {
    field.space()->check_index(anchor);
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field[i].is_finite()) {
            throw verification_error(kind + " produced a non-finite value at " +
                                     std::string(axis_name(axis)) + " index " + std::to_string(i));
        }
        if (field[i].value() < 0.0) {
            throw verification_error(kind + " produced a negative value at " +
                                     std::string(axis_name(axis)) + " index " + std::to_string(i));
        }
    }
    if (!(field[anchor] == ExtReal(0.0))) {
        throw verification_error(kind + " is nonzero at its anchor");
    }
    const double norm = field.sup_norm();
    if (!budget.satisfied_by(norm)) {
        std::ostringstream os;
        os << kind << " norm " << norm << " violates its budget " << budget.relation_text() << " "
           << budget.bound << " (" << budget.formula << ")";
        throw verification_error(os.str());
    }
    return Perturbation{axis, std::move(field), anchor, norm, std::move(budget), std::move(kind)};
}

// f - k(x) + r(y), evaluated in that order. This is the sign convention all
// two-axis syntheses use: the X-side perturbation lowers rows, the Y-side
// perturbation raises columns.
inline BiFunction perturbed_payoff(const BiFunction& f, const ScalarField& on_x,
                                   const ScalarField& on_y) {
    if (on_x.space() != f.space_x() || on_y.space() != f.space_y()) {
        throw input_error("perturbation fields must live on the payoff's spaces");
    }
    if (!on_x.all_finite() || !on_y.all_finite()) {
        throw input_error("perturbation fields must be finite");
    }
    std::vector<ExtReal> vals;
    vals.reserve(f.rows() * f.cols());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        const double kx = on_x[i].value();
        for (std::size_t j = 0; j < f.cols(); ++j) {
            vals.push_back(ext_shift(ext_shift(f(i, j), -kx), on_y[j].value()));
        }
    }
    return BiFunction(f.space_x(), f.space_y(), std::move(vals));
}

// f + s(x) + u(y): the additive convention used when probing the solution
// map. Converting between the two conventions is a sign flip on the X side.
inline BiFunction shifted_payoff(const BiFunction& f, const ScalarField& on_x,
                                 const ScalarField& on_y) {
    if (on_x.space() != f.space_x() || on_y.space() != f.space_y()) {
        throw input_error("shift fields must live on the payoff's spaces");
    }
    if (!on_x.all_finite() || !on_y.all_finite()) {
        throw input_error("shift fields must be finite");
    }
    std::vector<ExtReal> vals;
    vals.reserve(f.rows() * f.cols());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        const double sx = on_x[i].value();
        for (std::size_t j = 0; j < f.cols(); ++j) {
            vals.push_back(ext_shift(ext_shift(f(i, j), sx), on_y[j].value()));
        }
    }
    return BiFunction(f.space_x(), f.space_y(), std::move(vals));
}

// A matched pair of one-axis perturbations together with the payoff they
// produce: combined = f - on_x + on_y.
struct PerturbationPair {
    Perturbation on_x;
    Perturbation on_y;
    BiFunction combined;
};

// --- minimum-attainment perturbations (one axis) ------------------------

namespace detail {

// max(0, top - v) for finite top; +inf inputs contribute 0 (they can only
// help a minimum), -inf inputs poison the result and are caught upstream.
inline double pos_gap_from_above(double top, ExtReal v) {
    if (v.is_pos_inf()) return 0.0;
    if (v.is_neg_inf()) return std::numeric_limits<double>::infinity();
    const double d = top - v.value();
    return d > 0.0 ? d : 0.0;
}

inline void require_positive_finite(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw input_error(std::string(name) + " must be a positive finite number");
    }
}

} // namespace detail

// The gap-closing perturbation h(x) = max(0, f1(x0) - f1(x)). Adding it to
// f1 makes x0 a global minimizer while moving nothing by more than the
// value gap f1(x0) - inf f1, and that budget is met with equality.
inline Perturbation kr_min_perturbation(const ScalarField& f1, std::size_t x0,
                                        Axis axis = Axis::X, double tol = kDefaultTolerance) {
    f1.space()->check_index(x0);
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    const ExtReal at_anchor = f1[x0];
    if (at_anchor.is_pos_inf()) {
        throw precondition_error("anchor lies outside the effective domain: f1(x0) = +inf");
    }
    const ExtReal bottom = f1.min_value();
    if (bottom.is_neg_inf()) {
        throw precondition_error("f1 is not bounded below; no finite perturbation can anchor "
                                 "its minimum");
    }
    const double top = at_anchor.finite_value();
    std::vector<ExtReal> h(f1.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        h[i] = ExtReal(detail::pos_gap_from_above(top, f1[i]));
    }
    Budget budget{Budget::Relation::Equal, top - bottom.finite_value(), "f1(x0) - inf f1"};
    Perturbation p = make_perturbation(axis, ScalarField(f1.space(), std::move(h)), x0,
                                       std::move(budget), "min-attainment");
    // Attainment check: f1 + h reaches its minimum at the anchor with the
    // anchor's original value.
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const ExtReal lifted = ext_shift(f1[i], p.field[i].value());
        if (lifted < ExtReal(top - tol)) {
            throw verification_error("min-attainment failed: (f1+h)(" + std::to_string(i) +
                                     ") = " + ext_to_string(lifted) + " undercuts f1(x0) = " +
                                     std::to_string(top));
        }
    }
    return p;
}

// Gap-closing plus a strictly positive bump: x0 becomes the unique global
// minimizer, at the price of an eps/2 (< eps) widening of the budget.
inline Perturbation kr_strong_min_perturbation(const ScalarField& f1, std::size_t x0, double eps,
                                               Axis axis = Axis::X,
                                               double tol = kDefaultTolerance) {
    detail::require_positive_finite(eps, "eps");
    Perturbation base = kr_min_perturbation(f1, x0, axis, tol);
    const ScalarField spike = bump(f1.space(), x0, eps);
    std::vector<ExtReal> h(f1.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        h[i] = ExtReal(base.field[i].value() + spike[i].value());
    }
    Budget budget{Budget::Relation::LessThan, base.budget.bound + eps,
                  "(f1(x0) - inf f1) + eps"};
    Perturbation p = make_perturbation(axis, ScalarField(f1.space(), std::move(h)), x0,
                                       std::move(budget), "strong-min-attainment");
    // Strictness check: away from the anchor the lifted value must stay
    // strictly above the anchor value.
    const double top = f1[x0].finite_value();
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const ExtReal lifted = ext_shift(f1[i], p.field[i].value());
        if (i == x0) continue;
        if (!(lifted > ExtReal(top))) {
            throw verification_error("strong-min-attainment failed: (f1+h)(" + std::to_string(i) +
                                     ") = " + ext_to_string(lifted) +
                                     " does not exceed the anchor value " + std::to_string(top));
        }
    }
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const ExtReal lifted = ext_shift(f1[i], p.field[i].value());
        if (lifted < ExtReal(top - tol)) {
            throw verification_error("strong-min-attainment failed to keep the anchor minimal");
        }
    }
    return p;
}

// --- one-sided value-attainment pairs (two axes) -------------------------

// Makes x0 attain the sup-inf value: q flattens the lower envelope onto
// v(x0) from above, p lifts the x0 row so its infimum moves to f(x0,y0).
// Afterwards sup_x inf_y (f - q + p) = inf_y (f - q + p)(x0, .) = f(x0,y0).
inline PerturbationPair supinf_perturbation(const BiFunction& f, std::size_t x0, std::size_t y0,
                                            double eps, double delta,
                                            double tol = kDefaultTolerance) {
    detail::require_positive_finite(eps, "eps");
    detail::require_positive_finite(delta, "delta");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    f.space_x()->check_index(x0);
    f.space_y()->check_index(y0);

    const AssumptionReport assumptions = check_assumptions(f);
    if (!assumptions.sup_side_holds()) {
        const auto& bad = assumptions[0].holds ? assumptions[1] : assumptions[0];
        throw precondition_error("hypothesis " + bad.id + " fails: " + bad.detail);
    }
    const MinimaxSummary s = summarize(f);
    const double sup_inf = s.sup_inf.finite_value(); // finite once the lower envelope is proper
    const ExtReal v0 = s.v[x0];
    if (!v0.is_finite() || !((sup_inf - v0.value()) < eps)) {
        throw precondition_error("near-maximizer precondition v(x0) > V - eps fails: V - v(x0) = " +
                                 (v0.is_finite() ? std::to_string(sup_inf - v0.value())
                                                 : std::string("+inf")) +
                                 " is not < eps = " + std::to_string(eps));
    }
    const ExtReal center = f(x0, y0);
    if (!center.is_finite() || !((center.value() - v0.value()) < delta)) {
        throw precondition_error(
            "near-infimal precondition f(x0,y0) < v(x0) + delta fails: f(x0,y0) - v(x0) = " +
            (center.is_finite() ? std::to_string(center.value() - v0.value())
                                : std::string("+inf")) +
            " is not < delta = " + std::to_string(delta));
    }
    const double v0d = v0.value();
    const double f00 = center.value();

    std::vector<ExtReal> q(f.rows());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        q[i] = ExtReal(clamp_pos_diff(s.v[i], v0d));
    }
    std::vector<ExtReal> p(f.cols());
    for (std::size_t j = 0; j < f.cols(); ++j) {
        p[j] = ExtReal(detail::pos_gap_from_above(f00, f(x0, j)));
    }
    Perturbation on_x = make_perturbation(Axis::X, ScalarField(f.space_x(), std::move(q)), x0,
                                          Budget{Budget::Relation::Equal, sup_inf - v0d,
                                                 "V - v(x0)"},
                                          "supinf-attainment");
    Perturbation on_y = make_perturbation(Axis::Y, ScalarField(f.space_y(), std::move(p)), y0,
                                          Budget{Budget::Relation::Equal, f00 - v0d,
                                                 "f(x0,y0) - v(x0)"},
                                          "supinf-attainment");
    if (!(on_x.norm < eps)) {
        throw verification_error("supinf-attainment q norm reached eps");
    }
    if (!(on_y.norm < delta)) {
        throw verification_error("supinf-attainment p norm reached delta");
    }
    BiFunction combined = perturbed_payoff(f, on_x.field, on_y.field);
    const MinimaxSummary cs = summarize(combined);
    const ExtReal got_row = cs.v[x0];
    if (!got_row.is_finite() || std::fabs(got_row.value() - f00) > tol) {
        throw verification_error("supinf-attainment failed: inf_y of the perturbed x0 row is " +
                                 ext_to_string(got_row) + ", expected " + std::to_string(f00));
    }
    if (!cs.sup_inf.is_finite() || std::fabs(cs.sup_inf.value() - f00) > tol) {
        throw verification_error("supinf-attainment failed: perturbed sup-inf value is " +
                                 ext_to_string(cs.sup_inf) + ", expected " + std::to_string(f00));
    }
    for (std::size_t i = 0; i < f.rows(); ++i) {
        if (cs.v[i] > ExtReal(f00 + tol)) {
            throw verification_error("supinf-attainment failed: perturbed lower envelope "
                                     "exceeds the target value at x index " + std::to_string(i));
        }
    }
    return PerturbationPair{std::move(on_x), std::move(on_y), std::move(combined)};
}

// Mirror image of supinf_perturbation: makes y0 attain the inf-sup value.
// h caps the y0 column at f(x0,y0) from above, g lifts the upper envelope
// onto w(y0). Afterwards inf_y sup_x (f - h + g) = sup_x (f - h + g)(., y0)
// = f(x0,y0).
inline PerturbationPair infsup_perturbation(const BiFunction& f, std::size_t x0, std::size_t y0,
                                            double eps, double delta,
                                            double tol = kDefaultTolerance) {
    detail::require_positive_finite(eps, "eps");
    detail::require_positive_finite(delta, "delta");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    f.space_x()->check_index(x0);
    f.space_y()->check_index(y0);

    const AssumptionReport assumptions = check_assumptions(f);
    if (!assumptions.inf_side_holds()) {
        const auto& bad = assumptions[2].holds ? assumptions[3] : assumptions[2];
        throw precondition_error("hypothesis " + bad.id + " fails: " + bad.detail);
    }
    const MinimaxSummary s = summarize(f);
    const double inf_sup = s.inf_sup.finite_value(); // finite once the upper envelope is proper
    const ExtReal w0 = s.w[y0];
    if (!w0.is_finite() || !((w0.value() - inf_sup) < eps)) {
        throw precondition_error("near-minimizer precondition w(y0) < W + eps fails: w(y0) - W = " +
                                 (w0.is_finite() ? std::to_string(w0.value() - inf_sup)
                                                 : std::string("+inf")) +
                                 " is not < eps = " + std::to_string(eps));
    }
    const ExtReal center = f(x0, y0);
    if (!center.is_finite() || !((w0.value() - center.value()) < delta)) {
        throw precondition_error(
            "near-supremal precondition f(x0,y0) > w(y0) - delta fails: w(y0) - f(x0,y0) = " +
            (center.is_finite() ? std::to_string(w0.value() - center.value())
                                : std::string("+inf")) +
            " is not < delta = " + std::to_string(delta));
    }
    const double w0d = w0.value();
    const double f00 = center.value();

    std::vector<ExtReal> h(f.rows());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        h[i] = ExtReal(clamp_pos_diff(f(i, y0), f00));
    }
    std::vector<ExtReal> g(f.cols());
    for (std::size_t j = 0; j < f.cols(); ++j) {
        g[j] = ExtReal(detail::pos_gap_from_above(w0d, s.w[j]));
    }
    Perturbation on_x = make_perturbation(Axis::X, ScalarField(f.space_x(), std::move(h)), x0,
                                          Budget{Budget::Relation::Equal, w0d - f00,
                                                 "w(y0) - f(x0,y0)"},
                                          "infsup-attainment");
    Perturbation on_y = make_perturbation(Axis::Y, ScalarField(f.space_y(), std::move(g)), y0,
                                          Budget{Budget::Relation::Equal, w0d - inf_sup,
                                                 "w(y0) - W"},
                                          "infsup-attainment");
    if (!(on_y.norm < eps)) {
        throw verification_error("infsup-attainment g norm reached eps");
    }
    if (!(on_x.norm < delta)) {
        throw verification_error("infsup-attainment h norm reached delta");
    }
    BiFunction combined = perturbed_payoff(f, on_x.field, on_y.field);
    const MinimaxSummary cs = summarize(combined);
    const ExtReal got_col = cs.w[y0];
    if (!got_col.is_finite() || std::fabs(got_col.value() - f00) > tol) {
        throw verification_error("infsup-attainment failed: sup_x of the perturbed y0 column is " +
                                 ext_to_string(got_col) + ", expected " + std::to_string(f00));
    }
    if (!cs.inf_sup.is_finite() || std::fabs(cs.inf_sup.value() - f00) > tol) {
        throw verification_error("infsup-attainment failed: perturbed inf-sup value is " +
                                 ext_to_string(cs.inf_sup) + ", expected " + std::to_string(f00));
    }
    for (std::size_t j = 0; j < f.cols(); ++j) {
        if (cs.w[j] < ExtReal(f00 - tol)) {
            throw verification_error("infsup-attainment failed: perturbed upper envelope "
                                     "undercuts the target value at y index " + std::to_string(j));
        }
    }
    return PerturbationPair{std::move(on_x), std::move(on_y), std::move(combined)};
}

// --- saddle-creating pairs ------------------------------------------------

// Turns any (eps1, eps2)-near-optimal pair into an exact saddle point of
// f - k + r, where k = q + h and r = p + g combine the two one-sided
// constructions run with the internal slack delta = eps1 + eps2 + gap.
inline PerturbationPair saddle_perturbation(const BiFunction& f, std::size_t x0, std::size_t y0,
                                            double eps1, double eps2,
                                            double tol = kDefaultTolerance) {
    detail::require_positive_finite(eps1, "eps1");
    detail::require_positive_finite(eps2, "eps2");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    f.space_x()->check_index(x0);
    f.space_y()->check_index(y0);

    const MinimaxSummary s = summarize(f);
    if (!s.gap_defined() || !s.gap->is_finite()) {
        throw precondition_error("saddle synthesis needs a finite duality gap; gap = " +
                                 (s.gap_defined() ? ext_to_string(*s.gap)
                                                  : std::string("undefined")));
    }
    const double delta = (eps1 + eps2) + s.gap->value();
    PerturbationPair lower = supinf_perturbation(f, x0, y0, eps1, delta, tol);
    PerturbationPair upper = infsup_perturbation(f, x0, y0, eps2, delta, tol);

    std::vector<ExtReal> k(f.rows()), r(f.cols());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        k[i] = ExtReal(lower.on_x.field[i].value() + upper.on_x.field[i].value());
    }
    for (std::size_t j = 0; j < f.cols(); ++j) {
        r[j] = ExtReal(lower.on_y.field[j].value() + upper.on_y.field[j].value());
    }
    Perturbation on_x = make_perturbation(Axis::X, ScalarField(f.space_x(), std::move(k)), x0,
                                          Budget{Budget::Relation::LessThan, eps1 + delta,
                                                 "2*eps1 + eps2 + gap"},
                                          "saddle-creation");
    Perturbation on_y = make_perturbation(Axis::Y, ScalarField(f.space_y(), std::move(r)), y0,
                                          Budget{Budget::Relation::LessThan, eps2 + delta,
                                                 "eps1 + 2*eps2 + gap"},
                                          "saddle-creation");
    BiFunction combined = perturbed_payoff(f, on_x.field, on_y.field);
    if (!(combined(x0, y0) == f(x0, y0))) {
        throw verification_error("saddle-creation moved the anchor value");
    }
    SaddleCertificate cert = is_saddle(combined, x0, y0, tol);
    if (!cert.valid) {
        throw verification_error("saddle-creation failed its two-sided check: " +
                                 cert.violation->message());
    }
    return PerturbationPair{std::move(on_x), std::move(on_y), std::move(combined)};
}

// Specialization to eps-saddle points of a gap-free payoff: both slacks are
// eps/3 and the resulting pair moves nothing by eps or more.
inline PerturbationPair eps_saddle_perturbation(const BiFunction& f, std::size_t x0,
                                                std::size_t y0, double eps,
                                                double tol = kDefaultTolerance) {
    detail::require_positive_finite(eps, "eps");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    f.space_x()->check_index(x0);
    f.space_y()->check_index(y0);
    const MinimaxSummary s = summarize(f);
    if (!s.gap_zero(tol)) {
        throw precondition_error("eps-saddle synthesis requires a zero duality gap; gap = " +
                                 (s.gap_defined() ? ext_to_string(*s.gap)
                                                  : std::string("undefined")));
    }
    if (!eps_saddle_member(s, x0, y0, eps)) {
        std::ostringstream os;
        os << "(" << x0 << "," << y0 << ") is not an eps-saddle point for eps = " << eps
           << ": need V - v(x0) < eps/3 and w(y0) - W < eps/3, got V - v(x0) = "
           << (s.v[x0].is_finite() ? std::to_string(s.sup_inf.value() - s.v[x0].value())
                                   : ext_to_string(s.v[x0]))
           << " and w(y0) - W = "
           << (s.w[y0].is_finite() ? std::to_string(s.w[y0].value() - s.inf_sup.value())
                                   : ext_to_string(s.w[y0]));
        throw precondition_error(os.str());
    }
    const double third = eps / 3.0;
    PerturbationPair pair = saddle_perturbation(f, x0, y0, third, third, tol);
    Perturbation on_x = make_perturbation(Axis::X, pair.on_x.field, x0,
                                          Budget{Budget::Relation::LessThan, eps, "eps"},
                                          "eps-saddle-relocation");
    Perturbation on_y = make_perturbation(Axis::Y, pair.on_y.field, y0,
                                          Budget{Budget::Relation::LessThan, eps, "eps"},
                                          "eps-saddle-relocation");
    return PerturbationPair{std::move(on_x), std::move(on_y), std::move(pair.combined)};
}

// --- well-posedness sharpener ---------------------------------------------

namespace detail {

// Closed form of sum_{n>=1} 2^-n * min(1, n*d): equals 1 for d >= 1, and
// d*(2 - (M+1)*2^(1-M)/2...) + 2^(1-M)/2 with M = ceil(1/d) otherwise.
// Monotone nondecreasing in d, positive for d > 0, and bounded by 1.
inline double series_weight(double d) {
    if (d <= 0.0) return 0.0;
    if (d >= 1.0) return 1.0;
    const double m = std::ceil(1.0 / d);
    if (m > 1.0e6) {
        // The geometric correction terms vanish below double precision;
        // the series behaves as 2*d.
        return 2.0 * d;
    }
    const int mi = static_cast<int>(m);
    const double t = std::ldexp(1.0, -(mi - 1)); // 2^(1-M)
    const double s = 2.0 - (m + 1.0) * t;        // sum_{n<M} tail-free part
    return d * s + t;
}

} // namespace detail

// The saddle-creating pair followed by a strictly separating sharpener:
// k'(x) = delta * sum_{n>=1} 2^-n min(1, n d(x,x0)) and its mirror r' on Y.
// The final payoff has (x0,y0) as its unique saddle point, i.e. the
// perturbed problem is well-posed.
struct WellposedPerturbation {
    PerturbationPair base;            // (k, r) applied to f
    PerturbationPair sharpener;       // (k', r') applied to base.combined
    int n_terms = 0;                  // reference partial-sum length
    double truncation_bound = 0.0;    // sup-norm gap to that partial sum
    SaddleCertificate unique_saddle;  // of sharpener.combined
};

inline WellposedPerturbation wellposed_perturbation(const BiFunction& f, std::size_t x0,
                                                    std::size_t y0, double eps1, double eps2,
                                                    double delta, int n_terms = 53,
                                                    double tol = kDefaultTolerance) {
    detail::require_positive_finite(delta, "delta");
    if (n_terms < 1 || n_terms > 1074) {
        throw input_error("n_terms must lie in [1, 1074]");
    }
    PerturbationPair base = saddle_perturbation(f, x0, y0, eps1, eps2, tol);
    const BiFunction& mid = base.combined;

    std::vector<ExtReal> kx(f.rows()), ry(f.cols());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        kx[i] = ExtReal(delta * detail::series_weight(f.space_x()->dist(i, x0)));
    }
    for (std::size_t j = 0; j < f.cols(); ++j) {
        ry[j] = ExtReal(delta * detail::series_weight(f.space_y()->dist(j, y0)));
    }
    Perturbation on_x = make_perturbation(Axis::X, ScalarField(f.space_x(), std::move(kx)), x0,
                                          Budget{Budget::Relation::AtMost, delta, "delta"},
                                          "wellposed-sharpener");
    Perturbation on_y = make_perturbation(Axis::Y, ScalarField(f.space_y(), std::move(ry)), y0,
                                          Budget{Budget::Relation::AtMost, delta, "delta"},
                                          "wellposed-sharpener");
    for (std::size_t i = 0; i < f.rows(); ++i) {
        if (i != x0 && !(on_x.field[i] > ExtReal(0.0))) {
            throw verification_error("wellposed-sharpener is not strictly positive away from "
                                     "the anchor on X (index " + std::to_string(i) + ")");
        }
    }
    for (std::size_t j = 0; j < f.cols(); ++j) {
        if (j != y0 && !(on_y.field[j] > ExtReal(0.0))) {
            throw verification_error("wellposed-sharpener is not strictly positive away from "
                                     "the anchor on Y (index " + std::to_string(j) + ")");
        }
    }
    BiFunction sharpened = perturbed_payoff(mid, on_x.field, on_y.field);

    std::vector<SaddleCertificate> saddles = enumerate_saddles(sharpened, tol);
    if (saddles.size() != 1 || saddles.front().x0 != x0 || saddles.front().y0 != y0) {
        throw verification_error("wellposed-sharpener did not isolate a unique saddle at the "
                                 "anchor (found " + std::to_string(saddles.size()) + ")");
    }
    const MinimaxSummary cs = summarize(sharpened);
    if (cs.sup_argset != std::vector<std::size_t>{x0} ||
        cs.inf_argset != std::vector<std::size_t>{y0}) {
        throw verification_error("wellposed-sharpener left a non-singleton optimizer set");
    }
    WellposedPerturbation out{std::move(base),
                              PerturbationPair{std::move(on_x), std::move(on_y),
                                               std::move(sharpened)},
                              n_terms,
                              delta * std::ldexp(1.0, -n_terms),
                              std::move(saddles.front())};
    return out;
}

// --- topology-flavored witnesses -------------------------------------------

// For the indicator-style payoff (0 on the target set, 1 elsewhere) the
// gap-closing perturbation is exactly the characteristic function of the
// target set: perturbing recovers point/set separation.
inline Perturbation characteristic_regularity_witness(const SpacePtr& space,
                                                      const std::vector<std::size_t>& target,
                                                      std::size_t x0) {
    if (!space) throw input_error("characteristic_regularity_witness needs a space");
    space->check_index(x0);
    if (target.empty()) throw input_error("target set must be nonempty");
    std::vector<bool> in_target(space->size(), false);
    for (std::size_t a : target) {
        space->check_index(a);
        if (a == x0) {
            throw precondition_error("anchor belongs to the target set; no separation exists");
        }
        in_target[a] = true;
    }
    std::vector<ExtReal> vals(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) {
        vals[i] = ExtReal(in_target[i] ? 0.0 : 1.0);
    }
    Perturbation base = kr_min_perturbation(ScalarField(space, std::move(vals)), x0, Axis::X, 0.0);
    for (std::size_t i = 0; i < space->size(); ++i) {
        const ExtReal expected(in_target[i] ? 1.0 : 0.0);
        if (!(base.field[i] == expected)) {
            throw verification_error("regularity witness is not the characteristic function "
                                     "of the target set");
        }
    }
    if (base.norm != 1.0) {
        throw verification_error("regularity witness norm must be exactly 1");
    }
    return Perturbation{base.axis, base.field, base.anchor, base.norm,
                        Budget{Budget::Relation::Equal, 1.0, "f1(x0) - inf f1"},
                        "regularity-witness"};
}

// The strong-min gauge of the zero function and its strict sublevel sets
// L_n = { h < 1/n }: a nested neighborhood base at the anchor.
struct LocalBaseFamily {
    ScalarField gauge;
    double eps = 0.0;
    std::vector<std::vector<std::size_t>> sets; // sets[n-1] = L_n, ascending indices
};

inline LocalBaseFamily local_base_sets(const SpacePtr& space, std::size_t x0, double eps,
                                       int depth) {
    if (!space) throw input_error("local_base_sets needs a space");
    space->check_index(x0);
    detail::require_positive_finite(eps, "eps");
    if (depth < 1) throw input_error("depth must be >= 1");
    const ScalarField zero = ScalarField::constant(space, ExtReal(0.0));
    Perturbation strong = kr_strong_min_perturbation(zero, x0, eps, Axis::X, 0.0);
    LocalBaseFamily fam{strong.field, eps, {}};
    fam.sets.reserve(static_cast<std::size_t>(depth));
    for (int n = 1; n <= depth; ++n) {
        const double cut = 1.0 / static_cast<double>(n);
        std::vector<std::size_t> level;
        for (std::size_t i = 0; i < space->size(); ++i) {
            if (fam.gauge[i].value() < cut) level.push_back(i);
        }
        fam.sets.push_back(std::move(level));
    }
    for (std::size_t n = 1; n < fam.sets.size(); ++n) {
        if (!std::includes(fam.sets[n - 1].begin(), fam.sets[n - 1].end(), fam.sets[n].begin(),
                           fam.sets[n].end())) {
            throw verification_error("local base family lost its nesting");
        }
    }
    return fam;
}

} // namespace saddle
