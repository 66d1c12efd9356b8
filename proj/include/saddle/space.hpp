#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/extended.hpp"

namespace saddle {

class MetricSpace;
using SpacePtr = std::shared_ptr<const MetricSpace>;

// A named defect of a candidate distance table. Indices cite the offending
// entry or triple.
struct MetricViolation {
    enum class Kind {
        NotSquare,
        NanEntry,
        ZeroDiagonalFailure,
        Asymmetry,
        NonPositiveOffDiagonal,
        Triangle,
    };

    Kind kind = Kind::NotSquare;
    std::size_t i = 0, j = 0, k = 0;

    [[nodiscard]] std::string message() const {
        std::ostringstream os;
        switch (kind) {
        case Kind::NotSquare:
            os << "distance table is not square at row " << i;
            break;
        case Kind::NanEntry:
            os << "distance table has a NaN entry at (" << i << "," << j << ")";
            break;
        case Kind::ZeroDiagonalFailure:
            os << "zero-diagonal failure at (" << i << "," << i << ")";
            break;
        case Kind::Asymmetry:
            os << "asymmetry between (" << i << "," << j << ") and (" << j << "," << i << ")";
            break;
        case Kind::NonPositiveOffDiagonal:
            os << "non-positive off-diagonal distance at (" << i << "," << j << ")";
            break;
        case Kind::Triangle:
            os << "triangle violation at triple (" << i << "," << j << "," << k << ")";
            break;
        }
        return os.str();
    }
};

// Scans a distance table for metric-axiom defects, exactly as given
// (no tolerance). `rel_slack` loosens only the triangle scan and exists for
// diagnostics on tables produced by floating-point arithmetic.
inline std::optional<MetricViolation> find_metric_violation(
        const std::vector<std::vector<double>>& dist, double rel_slack = 0.0) {
    const std::size_t n = dist.size();
    using Kind = MetricViolation::Kind;
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i].size() != n) return MetricViolation{Kind::NotSquare, i, 0, 0};
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (std::isnan(dist[i][j])) return MetricViolation{Kind::NanEntry, i, j, 0};
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i][i] != 0.0) return MetricViolation{Kind::ZeroDiagonalFailure, i, i, 0};
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dist[i][j] != dist[j][i]) return MetricViolation{Kind::Asymmetry, i, j, 0};
            if (!(dist[i][j] > 0.0)) return MetricViolation{Kind::NonPositiveOffDiagonal, i, j, 0};
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const double direct = dist[i][j];
                const double detour = dist[i][k] + dist[k][j];
                if (direct > detour + rel_slack * direct) {
                    return MetricViolation{Kind::Triangle, i, j, k};
                }
            }
        }
    }
    return std::nullopt;
}

// Evenly spaced samples of a bounded real interval; open endpoints are
// excluded from the sample set but still shape the spacing.
struct GridSpec {
    double lower = 0.0;
    double upper = 1.0;
    bool lower_open = false;
    bool upper_open = false;
    int samples = 2;
};

// A finite metric space: points 0..size-1 with a symmetric positive
// distance table. Construct through validate_metric (exact axiom checks)
// or build_grid (trusted correctly-rounded line metric).
class MetricSpace {
public:
    static SpacePtr from_table(std::vector<std::vector<double>> dist,
                               std::vector<std::string> labels = {}) {
        if (dist.empty()) throw input_error("metric space needs at least one point");
        if (auto bad = find_metric_violation(dist)) throw input_error(bad->message());
        const std::size_t n = dist.size();
        if (!labels.empty() && labels.size() != n) {
            throw input_error("label count does not match point count");
        }
        MetricSpace s;
        s.n_ = n;
        s.flat_.reserve(n * n);
        for (const auto& row : dist) {
            s.flat_.insert(s.flat_.end(), row.begin(), row.end());
        }
        s.labels_ = std::move(labels);
        return std::make_shared<const MetricSpace>(std::move(s));
    }

    static SpacePtr from_grid(const GridSpec& spec) {
        if (!(spec.lower < spec.upper)) {
            throw input_error("grid requires lower < upper");
        }
        if (!std::isfinite(spec.lower) || !std::isfinite(spec.upper)) {
            throw input_error("grid bounds must be finite");
        }
        if (spec.samples < 2) throw input_error("grid requires at least 2 samples");
        const auto n = static_cast<std::size_t>(spec.samples);
        // Split the closed hull into D equal segments; open endpoints shift
        // the sample window inward by one segment.
        const double d_total = static_cast<double>(
            spec.samples - 1 + (spec.lower_open ? 1 : 0) + (spec.upper_open ? 1 : 0));
        std::vector<double> coords(n);
        const std::size_t off = spec.lower_open ? 1 : 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = static_cast<double>(j + off);
            coords[j] = (spec.lower * (d_total - t) + spec.upper * t) / d_total;
        }
        for (std::size_t j = 1; j < n; ++j) {
            if (!(coords[j - 1] < coords[j])) {
                throw input_error("grid samples collide; interval too small for this count");
            }
        }
        MetricSpace s;
        s.n_ = n;
        s.flat_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = coords[j] - coords[i];
                s.flat_[i * n + j] = d;
                s.flat_[j * n + i] = d;
            }
        }
        s.coords_ = std::move(coords);
        return std::make_shared<const MetricSpace>(std::move(s));
    }

    [[nodiscard]] std::size_t size() const { return n_; }

    [[nodiscard]] double dist(std::size_t i, std::size_t j) const {
        check_index(i);
        check_index(j);
        return flat_[i * n_ + j];
    }

    [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
    [[nodiscard]] bool has_coords() const { return !coords_.empty(); }
    [[nodiscard]] const std::vector<double>& coords() const { return coords_; }

    [[nodiscard]] std::string point_name(std::size_t i) const {
        check_index(i);
        if (i < labels_.size()) return labels_[i];
        return "#" + std::to_string(i);
    }

    // Smallest distance from point i to a nonempty index set.
    [[nodiscard]] double dist_to_set(std::size_t i, const std::vector<std::size_t>& set) const {
        if (set.empty()) throw input_error("distance to an empty set is undefined");
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a : set) best = std::min(best, dist(i, a));
        return best;
    }

    // Largest pairwise distance within an index set; 0 for empty/singleton.
    [[nodiscard]] double diameter_of(const std::vector<std::size_t>& set) const {
        double best = 0.0;
        for (std::size_t a = 0; a < set.size(); ++a) {
            for (std::size_t b = a + 1; b < set.size(); ++b) {
                best = std::max(best, dist(set[a], set[b]));
            }
        }
        return best;
    }

    void check_index(std::size_t i) const {
        if (i >= n_) {
            throw input_error("point index " + std::to_string(i) + " out of range (size " +
                              std::to_string(n_) + ")");
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<double> flat_;
    std::vector<std::string> labels_;
    std::vector<double> coords_;
};

// Validates every metric axiom exactly and wraps the table.
inline SpacePtr validate_metric(std::vector<std::vector<double>> dist,
                                std::vector<std::string> labels = {}) {
    return MetricSpace::from_table(std::move(dist), std::move(labels));
}

inline SpacePtr build_grid(const GridSpec& spec) { return MetricSpace::from_grid(spec); }

// An extended-real function on the points of one space.
class ScalarField {
public:
    ScalarField(SpacePtr space, std::vector<ExtReal> values)
        : space_(std::move(space)), values_(std::move(values)) {
        if (!space_) throw input_error("scalar field needs a space");
        if (values_.size() != space_->size()) {
            throw input_error("scalar field has " + std::to_string(values_.size()) +
                              " values for a space of size " + std::to_string(space_->size()));
        }
    }

    static ScalarField constant(SpacePtr space, ExtReal v) {
        if (!space) throw input_error("scalar field needs a space");
        return ScalarField(space, std::vector<ExtReal>(space->size(), v));
    }

    [[nodiscard]] const SpacePtr& space() const { return space_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] ExtReal operator[](std::size_t i) const { return values_.at(i); }
    [[nodiscard]] const std::vector<ExtReal>& values() const { return values_; }

    [[nodiscard]] bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(),
                           [](ExtReal v) { return v.is_finite(); });
    }

    [[nodiscard]] ExtReal min_value() const {
        ExtReal best = values_.front();
        for (ExtReal v : values_) best = ext_min(best, v);
        return best;
    }

    [[nodiscard]] ExtReal max_value() const {
        ExtReal best = values_.front();
        for (ExtReal v : values_) best = ext_max(best, v);
        return best;
    }

    [[nodiscard]] std::vector<std::size_t> argmin_set() const {
        const ExtReal m = min_value();
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i] == m) out.push_back(i);
        }
        return out;
    }

    [[nodiscard]] std::vector<std::size_t> argmax_set() const {
        const ExtReal m = max_value();
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i] == m) out.push_back(i);
        }
        return out;
    }

    // Sup norm of a finite field.
    [[nodiscard]] double sup_norm() const {
        double best = 0.0;
        for (ExtReal v : values_) best = std::max(best, std::fabs(v.finite_value()));
        return best;
    }

private:
    SpacePtr space_;
    std::vector<ExtReal> values_;
};

// The distance-quotient separator: 0 at the anchor, exactly 1 on the target
// set, values in [0,1] everywhere.
inline ScalarField urysohn_separator(const SpacePtr& space, std::size_t anchor,
                                     const std::vector<std::size_t>& target) {
    if (!space) throw input_error("urysohn_separator needs a space");
    space->check_index(anchor);
    if (target.empty()) throw input_error("urysohn_separator needs a nonempty target set");
    for (std::size_t a : target) {
        space->check_index(a);
        if (a == anchor) {
            throw precondition_error("anchor lies in the target set; separation impossible");
        }
    }
    std::vector<ExtReal> vals(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) {
        const double da = space->dist(i, anchor);
        const double dt = space->dist_to_set(i, target);
        // da + dt > 0 because anchor and target are disjoint.
        vals[i] = ExtReal(da / (da + dt));
    }
    return ScalarField(space, vals);
}

// A strictly positive bump away from the anchor, bounded by eps/2:
// (eps/2) * d / (1 + d).
inline ScalarField bump(const SpacePtr& space, std::size_t anchor, double eps) {
    if (!space) throw input_error("bump needs a space");
    space->check_index(anchor);
    if (!(eps > 0.0) || !std::isfinite(eps)) throw input_error("bump requires eps > 0");
    const double half = eps / 2.0;
    std::vector<ExtReal> vals(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) {
        const double d = space->dist(i, anchor);
        double t = d / (1.0 + d);
        // Keep the strict bound t < 1 even when d is so large that the
        // quotient rounds to 1.
        if (t >= 1.0) t = std::nextafter(1.0, 0.0);
        vals[i] = ExtReal(half * t);
    }
    return ScalarField(space, vals);
}

// Element n of the canonical nondecreasing separating family:
// h_n(x) = min(1, n * d(x, anchor)).
inline ScalarField nested_base_function(const SpacePtr& space, std::size_t anchor, int n) {
    if (!space) throw input_error("nested_base_function needs a space");
    space->check_index(anchor);
    if (n < 1) throw input_error("nested_base_function requires n >= 1");
    std::vector<ExtReal> vals(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) {
        vals[i] = ExtReal(std::min(1.0, static_cast<double>(n) * space->dist(i, anchor)));
    }
    return ScalarField(space, vals);
}

} // namespace saddle
