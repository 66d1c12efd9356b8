#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/extended.hpp"
#include "saddle/space.hpp"

namespace saddle {

// An extended-real payoff on the product of two finite metric spaces,
// stored row-major: rows are points of X (the sup player), columns are
// points of Y (the inf player).
class BiFunction {
public:
    BiFunction(SpacePtr x, SpacePtr y, std::vector<ExtReal> values)
        : x_(std::move(x)), y_(std::move(y)), values_(std::move(values)) {
        if (!x_ || !y_) throw input_error("payoff needs both spaces");
        if (values_.size() != x_->size() * y_->size()) {
            throw input_error("payoff table has " + std::to_string(values_.size()) +
                              " entries for a " + std::to_string(x_->size()) + "x" +
                              std::to_string(y_->size()) + " product");
        }
    }

    static BiFunction from_rows(SpacePtr x, SpacePtr y,
                                const std::vector<std::vector<ExtReal>>& rows) {
        if (!x || !y) throw input_error("payoff needs both spaces");
        if (rows.size() != x->size()) {
            throw input_error("payoff table has " + std::to_string(rows.size()) +
                              " rows for an X of size " + std::to_string(x->size()));
        }
        std::vector<ExtReal> flat;
        flat.reserve(x->size() * y->size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != y->size()) {
                throw input_error("payoff row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " entries for a Y of size " +
                                  std::to_string(y->size()));
            }
            flat.insert(flat.end(), rows[i].begin(), rows[i].end());
        }
        return BiFunction(std::move(x), std::move(y), std::move(flat));
    }

    [[nodiscard]] const SpacePtr& space_x() const { return x_; }
    [[nodiscard]] const SpacePtr& space_y() const { return y_; }
    [[nodiscard]] std::size_t rows() const { return x_->size(); }
    [[nodiscard]] std::size_t cols() const { return y_->size(); }

    [[nodiscard]] ExtReal operator()(std::size_t i, std::size_t j) const {
        x_->check_index(i);
        y_->check_index(j);
        return values_[i * cols() + j];
    }

    [[nodiscard]] const std::vector<ExtReal>& values() const { return values_; }

private:
    SpacePtr x_;
    SpacePtr y_;
    std::vector<ExtReal> values_;
};

// The two marginals, their optimal values, and the duality gap. The gap is
// absent exactly when V and W are infinities of the same sign.
struct MinimaxSummary {
    ScalarField v; // row infima, on X
    ScalarField w; // column suprema, on Y
    ExtReal sup_inf;  // V = sup v
    ExtReal inf_sup;  // W = inf w
    std::optional<ExtReal> gap; // W - V when defined; always >= 0
    std::vector<std::size_t> sup_argset; // argmax of v, ascending
    std::vector<std::size_t> inf_argset; // argmin of w, ascending

    [[nodiscard]] bool gap_defined() const { return gap.has_value(); }

    [[nodiscard]] bool gap_zero(double tol) const {
        return gap && gap->is_finite() && std::fabs(gap->value()) <= tol;
    }
};

inline MinimaxSummary summarize(const BiFunction& f) {
    const std::size_t nx = f.rows(), ny = f.cols();
    std::vector<ExtReal> v(nx), w(ny, ExtReal::neg_inf());
    for (std::size_t i = 0; i < nx; ++i) {
        ExtReal row_min = f(i, 0);
        for (std::size_t j = 0; j < ny; ++j) {
            const ExtReal val = f(i, j);
            row_min = ext_min(row_min, val);
            w[j] = ext_max(w[j], val);
        }
        v[i] = row_min;
    }
    MinimaxSummary s{ScalarField(f.space_x(), std::move(v)),
                     ScalarField(f.space_y(), std::move(w)),
                     ExtReal(0.0),
                     ExtReal(0.0),
                     std::nullopt,
                     {},
                     {}};
    s.sup_inf = s.v.max_value();
    s.inf_sup = s.w.min_value();
    s.gap = ext_sub(s.inf_sup, s.sup_inf);
    s.sup_argset = s.v.argmax_set();
    s.inf_argset = s.w.argmin_set();
    return s;
}

// One of the four standing hypotheses, with a witness index where a single
// point proves or refutes it.
struct AssumptionVerdict {
    std::string id;
    bool holds = false;
    bool vacuous = false; // holds automatically on finite spaces
    std::string detail;
    std::optional<std::size_t> witness;
};

struct AssumptionReport {
    std::array<AssumptionVerdict, 4> items;

    [[nodiscard]] const AssumptionVerdict& operator[](std::size_t i) const { return items.at(i); }

    [[nodiscard]] bool all_hold() const {
        return std::all_of(items.begin(), items.end(),
                           [](const AssumptionVerdict& a) { return a.holds; });
    }

    [[nodiscard]] bool sup_side_holds() const { return items[0].holds && items[1].holds; }
    [[nodiscard]] bool inf_side_holds() const { return items[2].holds && items[3].holds; }
};

inline AssumptionReport check_assumptions(const BiFunction& f) {
    const MinimaxSummary s = summarize(f);
    AssumptionReport rep{};

    rep.items[0] = {"payoff-usc-in-x", true, true,
                    "upper semicontinuity of each f(.,y) is automatic on a finite space",
                    std::nullopt};

    AssumptionVerdict lower{"lower-envelope-proper", true, false, "", std::nullopt};
    std::optional<std::size_t> finite_row, plus_inf_row;
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        if (s.v[i].is_pos_inf() && !plus_inf_row) plus_inf_row = i;
        if (s.v[i].is_finite() && !finite_row) finite_row = i;
    }
    if (plus_inf_row) {
        lower.holds = false;
        lower.witness = plus_inf_row;
        lower.detail = "inf_y f(x,y) = +inf at x index " + std::to_string(*plus_inf_row) +
                    " (values must stay in R united with -inf)";
    } else if (!finite_row) {
        lower.holds = false;
        lower.detail = "inf_y f(x,y) = -inf at every x; the lower envelope is improper";
    } else {
        lower.witness = finite_row;
        lower.detail = "lower envelope proper (finite at x index " + std::to_string(*finite_row) +
                    ") and bounded above by " + ext_to_string(s.sup_inf);
    }
    rep.items[1] = lower;

    rep.items[2] = {"payoff-lsc-in-y", true, true,
                    "lower semicontinuity of each f(x,.) is automatic on a finite space",
                    std::nullopt};

    AssumptionVerdict upper{"upper-envelope-proper", true, false, "", std::nullopt};
    std::optional<std::size_t> finite_col, minus_inf_col;
    for (std::size_t j = 0; j < s.w.size(); ++j) {
        if (s.w[j].is_neg_inf() && !minus_inf_col) minus_inf_col = j;
        if (s.w[j].is_finite() && !finite_col) finite_col = j;
    }
    if (minus_inf_col) {
        upper.holds = false;
        upper.witness = minus_inf_col;
        upper.detail = "sup_x f(x,y) = -inf at y index " + std::to_string(*minus_inf_col) +
                    " (values must stay in R united with +inf)";
    } else if (!finite_col) {
        upper.holds = false;
        upper.detail = "sup_x f(x,y) = +inf at every y; the upper envelope is improper";
    } else {
        upper.witness = finite_col;
        upper.detail = "upper envelope proper (finite at y index " + std::to_string(*finite_col) +
                    ") and bounded below by " + ext_to_string(s.inf_sup);
    }
    rep.items[3] = upper;

    return rep;
}

// The first failed comparison of a two-sided saddle check.
struct SaddleViolation {
    enum class Side { RowPlayer, ColumnPlayer };
    Side side = Side::RowPlayer;
    std::size_t index = 0; // x index for RowPlayer side, y index otherwise
    ExtReal observed{0.0};
    double bound = 0.0;

    [[nodiscard]] std::string message() const {
        std::ostringstream os;
        if (side == Side::RowPlayer) {
            os << "f(x,y0) = " << ext_to_string(observed) << " exceeds the saddle value bound "
               << bound << " at x index " << index;
        } else {
            os << "f(x0,y) = " << ext_to_string(observed) << " undercuts the saddle value bound "
               << bound << " at y index " << index;
        }
        return os.str();
    }
};

// Outcome of an exhaustive two-sided saddle check at (x0, y0).
struct SaddleCertificate {
    std::size_t x0 = 0, y0 = 0;
    double value = 0.0;
    bool valid = false;
    double tol = 0.0;
    std::size_t checked_row_side = 0; // comparisons f(x,y0) <= value + tol
    std::size_t checked_col_side = 0; // comparisons f(x0,y) >= value - tol
    std::optional<SaddleViolation> violation;
};

inline SaddleCertificate is_saddle(const BiFunction& f, std::size_t x0, std::size_t y0,
                                   double tol = kDefaultTolerance) {
    f.space_x()->check_index(x0);
    f.space_y()->check_index(y0);
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    const ExtReal center = f(x0, y0);
    if (!center.is_finite()) {
        throw precondition_error("saddle value f(x0,y0) must be finite, got " +
                                 ext_to_string(center));
    }
    SaddleCertificate cert;
    cert.x0 = x0;
    cert.y0 = y0;
    cert.value = center.value();
    cert.tol = tol;
    cert.valid = true;
    const double upper = center.value() + tol;
    const double lower = center.value() - tol;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        ++cert.checked_row_side;
        const ExtReal val = f(i, y0);
        if (val > ExtReal(upper) && cert.valid) {
            cert.valid = false;
            cert.violation = SaddleViolation{SaddleViolation::Side::RowPlayer, i, val, upper};
        }
    }
    for (std::size_t j = 0; j < f.cols(); ++j) {
        ++cert.checked_col_side;
        const ExtReal val = f(x0, j);
        if (val < ExtReal(lower) && cert.valid) {
            cert.valid = false;
            cert.violation = SaddleViolation{SaddleViolation::Side::ColumnPlayer, j, val, lower};
        }
    }
    return cert;
}

// All saddle points in lexicographic (x, y) order. At tol = 0 this uses the
// exact identity: the saddle set is argmax(v) x argmin(w) when V = W, and
// empty otherwise.
inline std::vector<SaddleCertificate> enumerate_saddles(const BiFunction& f,
                                                        double tol = kDefaultTolerance) {
    std::vector<SaddleCertificate> out;
    if (tol == 0.0) {
        const MinimaxSummary s = summarize(f);
        if (!s.gap_defined() || !(s.sup_inf == s.inf_sup) || !s.sup_inf.is_finite()) {
            return out;
        }
        for (std::size_t i : s.sup_argset) {
            for (std::size_t j : s.inf_argset) {
                SaddleCertificate cert = is_saddle(f, i, j, 0.0);
                if (!cert.valid) {
                    throw verification_error("saddle enumeration shortcut disagreed with the "
                                             "two-sided check at (" + std::to_string(i) + "," +
                                             std::to_string(j) + ")");
                }
                out.push_back(std::move(cert));
            }
        }
        return out;
    }
    for (std::size_t i = 0; i < f.rows(); ++i) {
        for (std::size_t j = 0; j < f.cols(); ++j) {
            if (!f(i, j).is_finite()) continue;
            SaddleCertificate cert = is_saddle(f, i, j, tol);
            if (cert.valid) out.push_back(std::move(cert));
        }
    }
    return out;
}

// Membership test shared by eps_saddle_set and the perturbation synthesis:
// both marginals within eps/3 of their optimal values, strictly, evaluated
// in subtraction form.
inline bool eps_saddle_member(const MinimaxSummary& s, std::size_t x, std::size_t y, double eps) {
    const double third = eps / 3.0;
    if (!s.sup_inf.is_finite() || !s.inf_sup.is_finite()) return false;
    const ExtReal vx = s.v[x];
    const ExtReal wy = s.w[y];
    if (!vx.is_finite() || !wy.is_finite()) return false;
    return (s.sup_inf.finite_value() - vx.value()) < third &&
           (wy.value() - s.inf_sup.finite_value()) < third;
}

// The eps-approximate saddle points. Membership is separable, so the set is
// the product of an X part and a Y part.
struct EpsSaddleSet {
    double eps = 0.0;
    std::vector<std::size_t> x_members; // ascending
    std::vector<std::size_t> y_members; // ascending
    ExtReal sup_inf{0.0};
    ExtReal inf_sup{0.0};

    [[nodiscard]] bool contains(std::size_t x, std::size_t y) const {
        return std::binary_search(x_members.begin(), x_members.end(), x) &&
               std::binary_search(y_members.begin(), y_members.end(), y);
    }

    [[nodiscard]] std::size_t pair_count() const { return x_members.size() * y_members.size(); }

    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        out.reserve(pair_count());
        for (std::size_t x : x_members) {
            for (std::size_t y : y_members) out.emplace_back(x, y);
        }
        return out;
    }
};

inline EpsSaddleSet eps_saddle_set(const BiFunction& f, double eps,
                                   double tol = kDefaultTolerance) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw input_error("eps must be > 0");
    if (tol < 0.0 || std::isnan(tol)) throw input_error("tolerance must be >= 0");
    const MinimaxSummary s = summarize(f);
    if (!s.gap_zero(tol)) {
        std::string gap_text = s.gap_defined() ? ext_to_string(*s.gap) : "undefined";
        throw precondition_error("eps-saddle sets require a zero duality gap; gap = " + gap_text);
    }
    EpsSaddleSet set;
    set.eps = eps;
    set.sup_inf = s.sup_inf;
    set.inf_sup = s.inf_sup;
    const double third = eps / 3.0;
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        if (s.v[i].is_finite() && (s.sup_inf.finite_value() - s.v[i].value()) < third) {
            set.x_members.push_back(i);
        }
    }
    for (std::size_t j = 0; j < s.w.size(); ++j) {
        if (s.w[j].is_finite() && (s.w[j].value() - s.inf_sup.finite_value()) < third) {
            set.y_members.push_back(j);
        }
    }
    return set;
}

// Smallest slack separating f(x0,y0) from breaking either saddle
// inequality; +inf when no competitor exists. Only meaningful when
// (x0,y0) is a saddle point.
inline double saddle_value_margin(const BiFunction& f, std::size_t x0, std::size_t y0) {
    const ExtReal center = f(x0, y0);
    if (!center.is_finite()) {
        throw precondition_error("margin needs a finite saddle value");
    }
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.rows(); ++i) {
        if (i == x0) continue;
        const ExtReal val = f(i, y0);
        margin = std::min(margin, val.is_neg_inf()
                                      ? std::numeric_limits<double>::infinity()
                                      : center.value() - val.value());
    }
    for (std::size_t j = 0; j < f.cols(); ++j) {
        if (j == y0) continue;
        const ExtReal val = f(x0, j);
        margin = std::min(margin, val.is_pos_inf()
                                      ? std::numeric_limits<double>::infinity()
                                      : val.value() - center.value());
    }
    return margin;
}

// The classic bilinear-difference instance on the open/half-open unit
// square, discretized: every finite grid has a saddle even though the
// underlying continuous problem has none (its would-be saddle sits at the
// excluded corner (1,1)).
struct CounterexampleReport {
    int samples = 0;
    BiFunction payoff;
    MinimaxSummary summary;
    SaddleCertificate saddle;            // the unique grid saddle
    std::size_t saddle_count = 0;
    std::pair<double, double> saddle_coords{0.0, 0.0};
    double distance_to_corner = 0.0;     // product max-metric distance to (1,1)
};

inline CounterexampleReport discretized_counterexample(int samples) {
    if (samples < 2) throw input_error("counterexample grid needs at least 2 samples");
    GridSpec gx{0.0, 1.0, true, true, samples};   // (0,1)
    GridSpec gy{0.0, 1.0, true, false, samples};  // (0,1]
    SpacePtr x = build_grid(gx);
    SpacePtr y = build_grid(gy);
    const std::size_t n = x->size();
    std::vector<ExtReal> vals;
    vals.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            vals.emplace_back(x->coords()[i] - y->coords()[j]);
        }
    }
    BiFunction f(x, y, std::move(vals));
    MinimaxSummary s = summarize(f);
    std::vector<SaddleCertificate> saddles = enumerate_saddles(f, 0.0);
    if (saddles.empty()) {
        throw verification_error("discretized counterexample lost its grid saddle");
    }
    CounterexampleReport rep{samples,
                             std::move(f),
                             std::move(s),
                             saddles.front(),
                             saddles.size(),
                             {x->coords()[saddles.front().x0], y->coords()[saddles.front().y0]},
                             0.0};
    // Distances to the excluded corner, taken from the exact rational grid
    // layout: X samples sit at j/(samples+1), Y samples at j/samples.
    const auto ix = static_cast<double>(rep.saddle.x0 + 1);
    const auto iy = static_cast<double>(rep.saddle.y0 + 1);
    const double dx = (static_cast<double>(samples) + 1.0 - ix) / (static_cast<double>(samples) + 1.0);
    const double dy = (static_cast<double>(samples) - iy) / static_cast<double>(samples);
    rep.distance_to_corner = std::max(dx, dy);
    return rep;
}

} // namespace saddle
