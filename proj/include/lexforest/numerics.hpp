#pragma once

#include <cmath>
#include <utility>

namespace lexf {

/// Maximize a unimodal function on [lo, hi] by golden-section search.
/// Returns the abscissa of the maximum; tolerates -inf values at the ends.
template <typename F>
double golden_section_max(F&& f, double lo, double hi, int iterations = 160) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations && c < d; ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Root of a monotone nondecreasing function g on [lo, hi] with g(lo) <= 0 <= g(hi).
template <typename F>
double bisect_increasing(F&& g, double lo, double hi, int iterations = 200) {
    for (int i = 0; i < iterations; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket exhausted in double precision
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace lexf
