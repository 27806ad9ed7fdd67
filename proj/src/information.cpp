#include "lexforest/information.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lexforest/errors.hpp"
#include "lexforest/numerics.hpp"

namespace lexf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared internals of F(P, lambda): the dual maximizer r*, the per-outcome
// log ratios ln(p_j/q_j) = ln(1 - r + r c_j) with c_j = p_{j*}^{-lambda}
// (c at the disagreement slot is 0), and the value itself.
struct InfoCore {
    double f = 0.0;
    double r = 0.0;
    std::vector<double> log_ratio;  // size b+1, disagreement slot last
};

InfoCore info_core(const CoordinateDistribution& coord, double lambda) {
    coord.validate();
    if (!(lambda >= 0.0)) throw std::invalid_argument("forest information: lambda must be >= 0");

    const auto& p = coord.diag_joint;
    const auto& m = coord.x0_marginal;
    const std::size_t b = p.size();
    const double pb = coord.disagreement_mass();

    std::vector<double> c(b, 0.0);
    double slope0 = 0.0;  // sum_j p_j c_j at r = 0
    for (std::size_t j = 0; j < b; ++j) {
        if (p[j] <= 0.0) continue;
        c[j] = std::pow(m[j], -lambda);
        slope0 += p[j] * c[j];
    }

    InfoCore out;
    out.log_ratio.assign(b + 1, 0.0);
    if (slope0 <= 1.0) return out;  // F = 0 exactly, q = p

    auto h = [&](double r) {
        double s = 0.0;
        for (std::size_t j = 0; j < b; ++j) {
            if (p[j] <= 0.0) continue;
            s += p[j] * std::log(1.0 - r + r * c[j]);
        }
        if (pb > 0.0) s += pb * std::log(1.0 - r);
        return s;
    };
    // h is concave with h'(0) = slope0 - 1 > 0; with zero disagreement mass
    // the maximum can sit on the boundary r = 1.
    double r_star;
    if (pb <= 0.0) {
        double hp1 = 0.0;
        for (std::size_t j = 0; j < b; ++j)
            if (p[j] > 0.0) hp1 += p[j] * (c[j] - 1.0) / c[j];
        r_star = hp1 >= 0.0 ? 1.0 : golden_section_max(h, 0.0, 1.0);
    } else {
        r_star = golden_section_max(h, 0.0, 1.0);
    }

    out.r = r_star;
    out.f = h(r_star);
    for (std::size_t j = 0; j < b; ++j)
        out.log_ratio[j] = (p[j] > 0.0) ? std::log(1.0 - r_star + r_star * c[j]) : 0.0;
    out.log_ratio[b] = (pb > 0.0) ? std::log(1.0 - r_star) : 0.0;
    return out;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// sum_j p_j p_{j*}^{-lambda}, the per-coordinate factor of the tree bound.
double bound_factor(const CoordinateDistribution& coord, double lambda) {
    double s = 0.0;
    for (std::size_t j = 0; j < coord.diag_joint.size(); ++j) {
        double pj = coord.diag_joint[j];
        if (pj <= 0.0) continue;
        s += pj * std::pow(coord.x0_marginal[j], -lambda);
    }
    return s;
}

}  // namespace

ForestInfoResult forest_information(const CoordinateDistribution& coord, double lambda) {
    const InfoCore core = info_core(coord, lambda);
    const auto& p = coord.diag_joint;
    const std::size_t b = p.size();
    const double pb = coord.disagreement_mass();

    ForestInfoResult res;
    res.r_star = core.r;
    res.f_value = core.f;
    res.q.assign(b + 1, 0.0);

    // Recover the entropy-side minimizer q_j = p_j e^{-log_ratio_j} and
    // normalize away the residual of the 1-D search.
    double qsum = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
        res.q[j] = p[j] > 0.0 ? p[j] * std::exp(-core.log_ratio[j]) : 0.0;
        qsum += res.q[j];
    }
    if (pb > 0.0) {
        res.q[b] = core.r < 1.0 ? pb / (1.0 - core.r) : 0.0;
        qsum += res.q[b];
    } else {
        res.q[b] = clamp01(1.0 - qsum);
        qsum += res.q[b];
    }
    if (qsum > 0.0)
        for (double& q : res.q) q /= qsum;

    double up = 0.0;
    for (std::size_t j = 0; j <= b; ++j) {
        const double pj = j < b ? p[j] : pb;
        if (pj > 0.0) up += pj * std::log(pj / res.q[j]);
    }
    res.duality_gap = std::abs(up - res.f_value);
    return res;
}

double variance_v(const CoordinateDistribution& coord, double lambda) {
    const InfoCore core = info_core(coord, lambda);
    const auto& p = coord.diag_joint;
    const std::size_t b = p.size();
    const double pb = coord.disagreement_mass();
    double var = 0.0;
    for (std::size_t j = 0; j <= b; ++j) {
        const double pj = j < b ? p[j] : pb;
        if (pj <= 0.0) continue;
        const double dev = core.log_ratio[j] - core.f;
        var += pj * dev * dev;
    }
    return var;
}

double information_budget(const DataModel& model, double p) {
    model.validate();
    if (!(p >= 0.5 && p <= 1.0))
        throw std::invalid_argument("information_budget: p must be in [1/2, 1]");
    auto xlnx = [](double x) { return x > 0.0 ? x * std::log(2.0 * x) : 0.0; };
    const double info = xlnx(p) + xlnx(1.0 - p);
    return std::log(static_cast<double>(model.n0)) + std::log(static_cast<double>(model.n1)) -
           static_cast<double>(model.dimension()) * info;
}

double classic_expected_tries(double p, std::int64_t d, std::int64_t n0, std::int64_t k,
                              ClassicMode mode) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("classic tries: p must be in (0,1]");
    if (d < 1 || n0 < 1) throw std::invalid_argument("classic tries: d and n0 must be positive");
    if (k < 0 || k > d) throw std::invalid_argument("classic tries: k must be in [0, d]");

    const double ln_n0 = std::log(static_cast<double>(n0));
    if (mode == ClassicMode::typical) {
        const auto m = static_cast<std::int64_t>(std::floor(p * static_cast<double>(d) + 1e-9));
        if (k > m) throw std::invalid_argument("classic tries: k exceeds floor(p d), bucket unreachable");
        double ln_t = ln_n0 - static_cast<double>(k) * std::log(2.0);
        for (std::int64_t i = 0; i < k; ++i)
            ln_t += std::log(static_cast<double>(d - i)) - std::log(static_cast<double>(m - i));
        return std::exp(ln_t);
    }

    // Full binomial sum over agreement counts j that can reach the bucket.
    const double ln_base = ln_n0 - static_cast<double>(k) * std::log(2.0) +
                           log_binomial(static_cast<double>(d), static_cast<double>(k));
    const double lp = std::log(p), lq = std::log1p(-p);
    double max_ln = -kInf;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(d - k + 1));
    for (std::int64_t j = k; j <= d; ++j) {
        const double dj = static_cast<double>(j);
        double ln_term = ln_base + log_binomial(static_cast<double>(d), dj) + dj * lp +
                         static_cast<double>(d - j) * (p < 1.0 ? lq : 0.0) -
                         log_binomial(dj, static_cast<double>(k));
        if (p >= 1.0 && j < d) continue;
        terms.push_back(ln_term);
        max_ln = std::max(max_ln, ln_term);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_ln);
    return std::exp(max_ln) * sum;
}

CutoffResult cutoff_exponent(const DataModel& model, std::int64_t n0) {
    model.validate();
    if (n0 < 1) throw std::invalid_argument("cutoff_exponent: n0 must be positive");
    const double ln_n0 = std::log(static_cast<double>(n0));
    if (ln_n0 == 0.0) return {0.0, 0.0};

    // Asymptotic slope of sum_i F_i is the total agreement information;
    // at or past it the objective has no attained maximum.
    double total_info = 0.0;
    for (const auto& c : model.coords)
        for (std::size_t j = 0; j < c.diag_joint.size(); ++j)
            if (c.diag_joint[j] > 0.0)
                total_info += c.diag_joint[j] * std::log(1.0 / c.x0_marginal[j]);
    if (ln_n0 >= total_info * (1.0 - 1e-12))
        throw insufficient_information(
            "cutoff_exponent: not enough data, the try objective is unbounded in lambda");

    auto objective = [&](double lambda) {
        double f_sum = 0.0;
        for (const auto& c : model.coords) f_sum += info_core(c, lambda).f;
        return lambda * ln_n0 - f_sum;
    };

    double hi = 1.0;
    int doublings = 0;
    while (objective(hi) >= objective(hi * 0.5)) {
        hi *= 2.0;
        if (++doublings > 64)
            throw insufficient_information("cutoff_exponent: maximizer bracket did not close");
    }
    const double lambda = golden_section_max(objective, 0.0, hi, 200);
    return {lambda, objective(lambda)};
}

double tree_success_bound(const DataModel& model, double lambda, double big_n) {
    model.validate();
    if (!(lambda >= 0.0)) throw std::invalid_argument("tree bound: lambda must be >= 0");
    if (!(big_n >= 1.0)) throw std::invalid_argument("tree bound: N must be >= 1");
    double bound = std::pow(big_n, -lambda);
    for (const auto& c : model.coords) bound *= std::max(1.0, bound_factor(c, lambda));
    return bound;
}

double forest_tries_lower_bound(const DataModel& model, double lambda, double big_n,
                                double success) {
    model.validate();
    if (!(lambda >= 0.0)) throw std::invalid_argument("forest bound: lambda must be >= 0");
    if (!(big_n >= 1.0)) throw std::invalid_argument("forest bound: N must be >= 1");
    if (!(success > 0.0 && success < 1.0))
        throw std::invalid_argument("forest bound: success must be in (0,1)");
    double f_sum = 0.0, v_sum = 0.0;
    for (const auto& c : model.coords) {
        f_sum += info_core(c, lambda).f;
        v_sum += variance_v(c, lambda);
    }
    return lambda * std::log(big_n) + std::log(success / 2.0) -
           std::sqrt(4.0 / success * v_sum) - f_sum;
}

double semilex_success_bound(const DataModel& model, double lambda, std::int64_t n0,
                             std::int64_t a) {
    model.validate();
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("semilex bound: lambda must be in [0,1]");
    if (n0 < 1 || a < 1) throw std::invalid_argument("semilex bound: n0 and a must be positive");
    const double big_n = std::max(1.0, 2.0 * static_cast<double>(n0) / static_cast<double>(a));
    double bound = 2.0 * (4.5 + std::log(big_n)) * std::pow(big_n, -lambda);
    for (const auto& c : model.coords) bound *= std::max(1.0, bound_factor(c, lambda));
    return bound;
}

namespace {

// Root in r of the per-coordinate extremum condition
// sum_j p_j / ((1-r) p_{j*}^lambda + r) = 1 (zero when the r=0 value is
// already below 1). The left side decreases in r.
double planner_r(const CoordinateDistribution& coord, double lambda) {
    const auto& p = coord.diag_joint;
    const auto& m = coord.x0_marginal;
    std::vector<double> mp(p.size());
    double at0 = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        mp[j] = std::pow(m[j], lambda);
        at0 += p[j] / mp[j];
    }
    if (at0 <= 1.0) return 0.0;
    auto neg_phi = [&](double r) {
        double s = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] <= 0.0) continue;
            s += p[j] / ((1.0 - r) * mp[j] + r);
        }
        return 1.0 - s;  // increasing in r
    };
    return bisect_increasing(neg_phi, 0.0, 1.0, 120);
}

struct CoordMoments {
    double e_u = 0.0, var_u = 0.0;
    double e_v = 0.0, var_v = 0.0;
    double e_w = 0.0;
};

CoordMoments coord_moments(const CoordinateDistribution& coord, double lambda, double r) {
    const auto& p = coord.diag_joint;
    const auto& m = coord.x0_marginal;
    const std::size_t b = p.size();
    const double pb = coord.disagreement_mass();

    CoordMoments cm;
    std::vector<double> lr(b + 1, 0.0), v(b, 0.0), w(b, 0.0);
    for (std::size_t j = 0; j < b; ++j) {
        if (p[j] <= 0.0) continue;
        const double ml = std::pow(m[j], lambda);
        const double denom = (1.0 - r) * ml + r;
        lr[j] = std::log(1.0 - r + r / ml);
        v[j] = -r * std::log(m[j]) / denom;
        w[j] = r * (1.0 - r) * std::log(m[j]) * std::log(m[j]) / (denom * denom);
    }
    lr[b] = (pb > 0.0 && r < 1.0) ? std::log(1.0 - r) : (pb > 0.0 ? -kInf : 0.0);

    for (std::size_t j = 0; j <= b; ++j) {
        const double pj = j < b ? p[j] : pb;
        cm.e_u += pj * lr[j];
    }
    for (std::size_t j = 0; j <= b; ++j) {
        const double pj = j < b ? p[j] : pb;
        if (pj <= 0.0) continue;
        cm.var_u += pj * (lr[j] - cm.e_u) * (lr[j] - cm.e_u);
    }
    for (std::size_t j = 0; j < b; ++j) cm.e_v += p[j] * v[j];
    for (std::size_t j = 0; j < b; ++j) {
        if (p[j] <= 0.0) continue;
        cm.var_v += p[j] * (v[j] - cm.e_v) * (v[j] - cm.e_v);
    }
    for (std::size_t j = 0; j < b; ++j) cm.e_w += p[j] * w[j];
    return cm;
}

}  // namespace

PlannerResult plan_tries(const DataModel& model, std::int64_t n0, std::int64_t a, double epsilon,
                         double delta, double tol) {
    model.validate();
    if (!(epsilon > 0.0)) throw std::invalid_argument("plan_tries: epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0 / 7.0))
        throw std::invalid_argument("plan_tries: delta must be in (0, 1/7)");
    if (n0 < 1 || a < 1) throw std::invalid_argument("plan_tries: n0 and a must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("plan_tries: tol must be positive");

    const std::size_t d = model.dimension();
    PlannerResult res;
    res.epsilon = epsilon;
    res.delta = delta;
    res.big_n = 2.0 * static_cast<double>(n0) / static_cast<double>(a);
    res.r.assign(d, 0.0);

    if (res.big_n <= 1.0) {
        res.degenerate = true;
        res.ln_tries = std::log(1.0 / delta);
        return res;
    }

    const double ln_n = std::log(res.big_n);
    const double target = (1.0 + epsilon) * ln_n;

    double ev_limit = 0.0;
    for (const auto& c : model.coords)
        for (std::size_t j = 0; j < c.diag_joint.size(); ++j)
            if (c.diag_joint[j] > 0.0)
                ev_limit += c.diag_joint[j] * std::log(1.0 / c.x0_marginal[j]);
    if (target >= ev_limit)
        throw insufficient_information(
            "plan_tries: E[V] cannot reach (1+eps) ln N, not enough information");

    auto total_ev = [&](double lambda) {
        double s = 0.0;
        for (const auto& c : model.coords) s += coord_moments(c, lambda, planner_r(c, lambda)).e_v;
        return s;
    };

    double hi = 1.0;
    int doublings = 0;
    while (total_ev(hi) < target) {
        hi *= 2.0;
        if (++doublings > 64)
            throw insufficient_information("plan_tries: E[V] bracket did not close");
    }
    const double lambda =
        bisect_increasing([&](double l) { return total_ev(l) - target; }, 0.0, hi, 120);

    res.lambda = lambda;
    for (std::size_t i = 0; i < d; ++i) {
        res.r[i] = planner_r(model.coords[i], lambda);
        const CoordMoments cm = coord_moments(model.coords[i], lambda, res.r[i]);
        res.e_u += cm.e_u;
        res.var_u += cm.var_u;
        res.e_v += cm.e_v;
        res.var_v += cm.var_v;
        res.e_w += cm.e_w;
    }
    if (std::abs(res.e_v - target) > std::max(tol, 1e-9 * target))
        throw numeric_error("plan_tries: extremum residual above tolerance");

    res.ln_tries = std::log(1.0 / delta) + (1.0 + 3.0 * epsilon) * lambda * ln_n - res.e_u;

    const double e2d = epsilon * epsilon * delta;
    res.conditions_ok[0] = res.var_u <= e2d * lambda * lambda * ln_n * ln_n;
    res.conditions_ok[1] = res.var_v <= e2d * ln_n * ln_n / 4.0;
    res.conditions_ok[2] = res.e_w <= e2d * ln_n * ln_n / 8.0;
    return res;
}

DimredComparison dimred_comparison(double p01, double p11, double p1_star, double n) {
    if (!(p01 > 0.0)) throw std::invalid_argument("dimred: p01 must be positive");
    if (!(p11 > 0.0)) throw std::invalid_argument("dimred: p11 must be positive");
    if (std::abs(p1_star - (p01 + p11)) > 1e-9)
        throw std::invalid_argument("dimred: inconsistent marginal, p1* must equal p01 + p11");
    if (!(p1_star < 0.5)) throw std::invalid_argument("dimred: p1* must be below 1/2");
    const double p0_star = 1.0 - p1_star;
    const double c = p0_star * p1_star / p01;
    if (!(c > 1.0))
        throw std::invalid_argument("dimred: ratio c <= 1, special pair not closer than random");

    DimredComparison res;
    res.c = c;
    res.n = n;
    res.ideal_dimred_exp = std::log2(2.0 * c / (2.0 * c - 1.0));
    res.im_exp = 1.0 / c;
    res.direct_exp_approx = std::log((c + 1.0) / (c - 1.0)) / std::log(1.0 / p1_star);

    // (1 - p1* - p01)/(1 - p1*)^lambda + p11/p1*^lambda = 1, increasing in
    // lambda and below 1 at lambda = 0.
    const double p00 = 1.0 - p1_star - p01;
    auto g = [&](double lambda) {
        return p00 * std::pow(p0_star, -lambda) + p11 * std::pow(p1_star, -lambda) - 1.0;
    };
    double hi = 1.0;
    while (g(hi) < 0.0) hi *= 2.0;
    res.direct_exp_exact = bisect_increasing(g, 0.0, hi);
    return res;
}

}  // namespace lexf
