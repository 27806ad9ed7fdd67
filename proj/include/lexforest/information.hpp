#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lexforest/model.hpp"

namespace lexf {

/// Value and extremizers of the bucketing forest information function
/// F(P, lambda). q is the minimizer of the constrained relative-entropy form
/// (one entry per value plus the disagreement slot); r_star maximizes the
/// concave 1-D dual. f_value is exactly zero when sum_j p_j p_{j*}^{-lambda}
/// <= 1.
struct ForestInfoResult {
    double f_value = 0.0;
    double r_star = 0.0;
    std::vector<double> q;
    double duality_gap = 0.0;
};

ForestInfoResult forest_information(const CoordinateDistribution& coord, double lambda);

/// V(P, lambda): variance of ln(p_Y/q_Y) under Y ~ p with q from
/// forest_information. Zero whenever F is zero.
double variance_v(const CoordinateDistribution& coord, double lambda);

/// ln M = ln n0 + ln n1 - d * (p ln 2p + (1-p) ln 2(1-p)) for the homogeneous
/// marginally Bernoulli(1/2) setting. Accepts 1/2 <= p <= 1.
double information_budget(const DataModel& model, double p);

enum class ClassicMode { typical, unconditional };

/// Expected tries of the classic k-coordinate bucketing baseline. Typical
/// mode conditions on the special pair agreeing in floor(p d) coordinates;
/// unconditional mode evaluates the full binomial sum over j >= k.
double classic_expected_tries(double p, std::int64_t d, std::int64_t n0, std::int64_t k,
                              ClassicMode mode);

struct CutoffResult {
    double lambda_cut = 0.0;
    double ln_tries = 0.0;
};

/// Maximizes lambda ln n0 - sum_i F(P_i, lambda) over lambda >= 0.
/// Throws insufficient_information when the objective is unbounded above
/// (ln n0 at least the model's total agreement information).
CutoffResult cutoff_exponent(const DataModel& model, std::int64_t n0);

/// Theorem-style bound N^{-lambda} prod_i max(1, sum_j p_ij p_ij*^{-lambda})
/// on the success probability of one bucketing tree with leaf probabilities
/// at most 1/N.
double tree_success_bound(const DataModel& model, double lambda, double big_n);

/// Lower bound on ln T for any bucketing forest with leaf probabilities at
/// most 1/N achieving success S:
/// lambda ln N + ln(S/2) - sqrt((4/S) sum_i V_i) - sum_i F_i.
double forest_tries_lower_bound(const DataModel& model, double lambda, double big_n,
                                double success);

/// Semi-lexicographic single-tree bound, valid for 0 <= lambda <= 1:
/// 2 ln(e^{4.5} N) N^{-lambda} prod_i max(1, sum_j p_ij p_ij*^{-lambda}),
/// with N = max(1, 2 n0 / a).
double semilex_success_bound(const DataModel& model, double lambda, std::int64_t n0,
                             std::int64_t a);

/// Try-budget planner outputs. lambda and the per-coordinate r solve the
/// min-max moment problem; ln_tries = ln(1/delta) + (1+3 eps) lambda ln N -
/// E[U]; conditions_ok reports the three variance conditions against their
/// thresholds (eps^2 delta lambda^2 ln^2 N, eps^2 delta ln^2 N / 4, /8).
struct PlannerResult {
    double lambda = 0.0;
    std::vector<double> r;
    double epsilon = 0.0;
    double delta = 0.0;
    double big_n = 0.0;
    double ln_tries = 0.0;
    double e_u = 0.0;
    double e_v = 0.0;
    double e_w = 0.0;
    double var_u = 0.0;
    double var_v = 0.0;
    std::array<bool, 3> conditions_ok{true, true, true};
    bool degenerate = false;  // N <= 1: planner pinned at lambda = 0
};

PlannerResult plan_tries(const DataModel& model, std::int64_t n0, std::int64_t a,
                         double epsilon, double delta, double tol = 1e-9);

/// Exponent comparison of direct sparse search against dimensionality
/// reduction in the symmetric sparse setting (p01 = p10, p1* = p10 + p11).
struct DimredComparison {
    double c = 0.0;                // random-to-special distance ratio
    double ideal_dimred_exp = 0.0; // log2(2c/(2c-1))
    double im_exp = 0.0;           // 1/c
    double direct_exp_exact = 0.0; // root of the two-term consistency equation
    double direct_exp_approx = 0.0;// ln((c+1)/(c-1)) / ln(1/p1*)
    double n = 0.0;                // set size the caller wants try counts for
};

DimredComparison dimred_comparison(double p01, double p11, double p1_star, double n);

}  // namespace lexf
