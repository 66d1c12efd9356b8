#pragma once

#include <cmath>
#include <compare>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>

#include "saddle/errors.hpp"

namespace saddle {

// Default tolerance for comparisons between *derived* quantities (sums,
// marginal gaps, verification inequalities). Raw input data is always
// compared exactly. Pass 0 to demand bit-exact verification, which is
// guaranteed to succeed when all inputs are dyadic lattice values.
inline constexpr double kDefaultTolerance = 1e-12;

// An extended real number: a finite double, +infinity, or -infinity.
// NaN is rejected at construction, so ordering is total.
class ExtReal {
public:
    constexpr ExtReal() = default;

    ExtReal(double v) : v_(v) { // NOLINT(google-explicit-constructor)
        if (std::isnan(v)) {
            throw input_error("extended real cannot be NaN");
        }
    }

    static ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
    static ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

    [[nodiscard]] double value() const { return v_; }
    [[nodiscard]] bool is_finite() const { return std::isfinite(v_); }
    [[nodiscard]] bool is_pos_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
    [[nodiscard]] bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }

    // The finite payload; callers use this only after checking finiteness.
    [[nodiscard]] double finite_value() const {
        if (!is_finite()) {
            throw std::logic_error("finite_value() on infinite extended real");
        }
        return v_;
    }

    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
    friend std::partial_ordering operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

private:
    double v_ = 0.0;
};

inline ExtReal ext_min(ExtReal a, ExtReal b) { return a < b ? a : b; }
inline ExtReal ext_max(ExtReal a, ExtReal b) { return a < b ? b : a; }

// a - b when it is defined on the extended line; nullopt for inf - inf of
// the same sign.
inline std::optional<ExtReal> ext_sub(ExtReal a, ExtReal b) {
    if ((a.is_pos_inf() && b.is_pos_inf()) || (a.is_neg_inf() && b.is_neg_inf())) {
        return std::nullopt;
    }
    if (!a.is_finite()) return a;
    if (!b.is_finite()) return b.is_pos_inf() ? ExtReal::neg_inf() : ExtReal::pos_inf();
    return ExtReal(a.value() - b.value());
}

// v + delta for finite delta: infinities absorb, finite values add in
// floating point.
inline ExtReal ext_shift(ExtReal v, double delta) {
    if (std::isnan(delta) || std::isinf(delta)) {
        throw std::logic_error("ext_shift expects a finite shift");
    }
    if (!v.is_finite()) return v;
    return ExtReal(v.value() + delta);
}

// max(0, a - b) for finite b; -inf clamps to 0, +inf propagates so the
// caller's finiteness validation can report it.
inline double clamp_pos_diff(ExtReal a, double b) {
    if (a.is_neg_inf()) return 0.0;
    if (a.is_pos_inf()) return std::numeric_limits<double>::infinity();
    double d = a.value() - b;
    return d > 0.0 ? d : 0.0;
}

// Shortest decimal string that round-trips to the same double.
inline std::string finite_to_string(double x) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline std::string ext_to_string(ExtReal v) {
    if (v.is_pos_inf()) return "+inf";
    if (v.is_neg_inf()) return "-inf";
    return finite_to_string(v.value());
}

} // namespace saddle
