#pragma once

#include <cassert>
#include <compare>
#include <limits>

namespace lexf {

/// Nonnegative extended real. Infinity means "coordinate unusable this try";
/// kept as an explicit state rather than a sentinel float so that ordering is
/// total by construction.
class Exponent {
public:
    constexpr Exponent() noexcept : value_(0.0), finite_(true) {}

    static constexpr Exponent finite(double v) noexcept {
        assert(v >= 0.0);
        return Exponent(v, true);
    }
    static constexpr Exponent infinity() noexcept {
        return Exponent(0.0, false);
    }

    constexpr bool is_finite() const noexcept { return finite_; }
    constexpr bool is_infinite() const noexcept { return !finite_; }

    /// Finite value; must not be called on infinity.
    constexpr double value() const noexcept {
        assert(finite_);
        return value_;
    }
    constexpr double value_or(double inf_stand_in) const noexcept {
        return finite_ ? value_ : inf_stand_in;
    }
    /// IEEE view, +inf for the infinite state.
    constexpr double as_double() const noexcept {
        return finite_ ? value_ : std::numeric_limits<double>::infinity();
    }

    friend constexpr bool operator==(const Exponent& a, const Exponent& b) noexcept {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }
    friend constexpr std::strong_ordering operator<=>(const Exponent& a, const Exponent& b) noexcept {
        if (a.finite_ && b.finite_) {
            if (a.value_ < b.value_) return std::strong_ordering::less;
            if (a.value_ > b.value_) return std::strong_ordering::greater;
            return std::strong_ordering::equal;
        }
        if (a.finite_) return std::strong_ordering::less;
        if (b.finite_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    constexpr Exponent(double v, bool f) noexcept : value_(v), finite_(f) {}
    double value_;
    bool finite_;
};

}  // namespace lexf
