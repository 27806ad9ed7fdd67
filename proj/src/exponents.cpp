#include "lexforest/exponents.hpp"

#include <cmath>
#include <stdexcept>

#include "lexforest/errors.hpp"
#include "lexforest/numerics.hpp"

namespace lexf {

namespace {

// Left side of the random-exponent equation minus 1. Strictly increasing in
// lambda whenever the coordinate has agreement mass on a non-degenerate
// marginal. Terms with p_j == 0 are skipped so boundary estimates
// (p_{j*} == 0) stay usable.
double imp_residual(const CoordinateDistribution& coord, double r, double lambda) {
    double s = 0.0;
    const auto& p = coord.diag_joint;
    const auto& m = coord.x0_marginal;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        s += p[j] / ((1.0 - r) * std::pow(m[j], lambda) + r);
    }
    return s - 1.0;
}

}  // namespace

Exponent random_exponent(const CoordinateDistribution& coord, double r, double tol) {
    coord.validate();
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("random_exponent: r must be in (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("random_exponent: tol must be positive");

    const double agree = coord.agreement_mass();
    if (r >= agree) return Exponent::infinity();
    if (imp_residual(coord, r, 0.0) >= 0.0) return Exponent::finite(0.0);

    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (imp_residual(coord, r, hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 1024) return Exponent::infinity();
    }
    double lambda = bisect_increasing(
        [&](double l) { return imp_residual(coord, r, l); }, lo, hi);
    if (std::abs(imp_residual(coord, r, lambda)) > tol)
        throw numeric_error("random_exponent: bisection did not reach the requested residual");
    return Exponent::finite(lambda);
}

Exponent bernoulli_exponent(double p, double r) {
    if (!(p > 0.5 && p < 1.0))
        throw std::invalid_argument("bernoulli_exponent: p must be in (1/2,1)");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("bernoulli_exponent: r must be in (0,1)");
    const double cut = (p - r) / (1.0 - r);
    if (cut <= 0.0) return Exponent::infinity();
    return Exponent::finite(-std::log2(cut));
}

Exponent greedy_exponent(const CoordinateDistribution& coord, double tol) {
    coord.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("greedy_exponent: tol must be positive");
    if (coord.agreement_mass() <= 0.0) return Exponent::infinity();

    // g(lambda) = sum_j p_j p_{j*}^{-lambda} - 1, increasing, g(0) <= 0.
    auto g = [&](double lambda) {
        double s = 0.0;
        for (std::size_t j = 0; j < coord.diag_joint.size(); ++j) {
            double pj = coord.diag_joint[j];
            if (pj <= 0.0) continue;
            s += pj * std::pow(coord.x0_marginal[j], -lambda);
        }
        return s - 1.0;
    };
    if (g(0.0) >= 0.0) return Exponent::finite(0.0);
    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 1024) return Exponent::infinity();
    }
    double lambda = bisect_increasing(g, lo, hi);
    if (std::abs(g(lambda)) > tol)
        throw numeric_error("greedy_exponent: bisection did not reach the requested residual");
    return Exponent::finite(lambda);
}

Exponent sparse_exponent(const CoordinateDistribution& coord, double r, SparseMode mode) {
    coord.validate();
    if (coord.alphabet_size() != 2)
        throw std::invalid_argument("sparse_exponent: coordinate must be binary");
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("sparse_exponent: r must be in [0,1)");
    const double p1_star = coord.x0_marginal[1];
    if (p1_star >= 1.0) throw std::invalid_argument("sparse_exponent: p_{1*} must be below 1");
    if (p1_star <= 0.0) throw std::invalid_argument("sparse_exponent: p_{1*} must be positive");

    const double p11 = coord.diag_joint[1];
    const double off = coord.disagreement_mass();  // p01 + p10
    if (off <= 0.0) throw std::invalid_argument("sparse_exponent: no off-diagonal mass");
    const double ratio = p11 / off;

    if (mode == SparseMode::conservative) {
        const double inv = (1.0 - r) * ratio * std::log(1.0 / p1_star);
        if (inv <= 0.0) return Exponent::infinity();
        return Exponent::finite(1.0 / inv);
    }
    const double arg = 1.0 - 1.0 / ((1.0 - r) * (1.0 + ratio));
    if (arg <= 0.0) return Exponent::infinity();
    return Exponent::finite(std::log(arg) / std::log(p1_star));
}

}  // namespace lexf
