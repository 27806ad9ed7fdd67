#include <doctest.h>

#include <cmath>

#include "lexforest/errors.hpp"
#include "lexforest/information.hpp"
#include "lexforest/presets.hpp"
#include "test_support.hpp"

using namespace lexf;

TEST_CASE("planner degenerates when the window swallows the set") {
    DataModel m = bernoulli_model(0.9, 32, 1, 1);
    const auto res = plan_tries(m, 4, 8, 0.1, 1.0 / 14.0);
    CHECK(res.degenerate);
    CHECK(res.lambda == 0.0);
    for (double r : res.r) CHECK(r == 0.0);
    CHECK(res.e_u == 0.0);
    CHECK(res.ln_tries == doctest::Approx(std::log(14.0)));
}

TEST_CASE("planner validates inputs") {
    DataModel m = bernoulli_model(0.9, 32, 1, 1);
    CHECK_THROWS_AS(plan_tries(m, 1024, 4, -0.1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(plan_tries(m, 1024, 4, 0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(plan_tries(m, 0, 4, 0.1, 0.05), std::invalid_argument);
}

TEST_CASE("planner flags insufficient information") {
    DataModel m = bernoulli_model(0.9, 4, 1, 1);
    CHECK_THROWS_AS(plan_tries(m, 1 << 30, 4, 0.1, 0.05), insufficient_information);
}

TEST_CASE("planner satisfies its extremum conditions") {
    DataModel m = bernoulli_model(0.9, 256, 1, 1);
    const std::int64_t n0 = 4096, a = 4;
    const double eps = 0.1, delta = 1.0 / 14.0;
    const auto res = plan_tries(m, n0, a, eps, delta, 1e-9);
    const double ln_n = std::log(res.big_n);

    CHECK(res.big_n == doctest::Approx(2.0 * n0 / a));
    CHECK(std::abs(res.e_v - (1.0 + eps) * ln_n) <= 1e-8);
    CHECK(res.ln_tries ==
          doctest::Approx(std::log(1.0 / delta) + (1.0 + 3.0 * eps) * res.lambda * ln_n - res.e_u));

    // every r_i is zero or satisfies the per-coordinate equation
    for (std::size_t i = 0; i < m.dimension(); ++i) {
        if (res.r[i] == 0.0) continue;
        CHECK(std::abs(test::imp_residual(m.coords[i], res.r[i], res.lambda)) <= 1e-8);
    }
}

TEST_CASE("homogeneous planner reduces to the coordinate-count equation") {
    // marginally Bernoulli(1/2): r_i = (p - 2^-lambda)/(1 - 2^-lambda) and the
    // E[V] condition becomes sum_i r_i = (1+eps) log2 N
    const double p = 0.9;
    DataModel m = bernoulli_model(p, 256, 1, 1);
    const std::int64_t n0 = 4096, a = 4;
    const double eps = 1e-6, delta = 0.05;
    const auto res = plan_tries(m, n0, a, eps, delta, 1e-10);
    const double big_n = 2.0 * n0 / a;

    // all coordinates identical: one shared r
    for (double r : res.r) CHECK(r == doctest::Approx(res.r[0]));

    const double u = std::pow(2.0, -res.lambda);
    CHECK(res.r[0] == doctest::Approx((p - u) / (1.0 - u)).epsilon(1e-6));

    double r_sum = 0.0;
    for (double r : res.r) r_sum += r;
    CHECK(r_sum == doctest::Approx((1.0 + eps) * std::log2(big_n)).epsilon(1e-6));
}

TEST_CASE("planner condition sums match hand enumeration on one coordinate") {
    // one-coordinate model, so the theorem's sums can be written out directly
    DataModel m;
    m.coords.push_back(CoordinateDistribution{{0.5, 0.25}, {0.625, 0.375}, std::nullopt});
    m.coords.push_back(m.coords[0]);
    const auto res = plan_tries(m, 3, 4, 0.5, 0.05, 1e-9);
    REQUIRE(!res.degenerate);
    const double lam = res.lambda;

    double e_u = 0.0, var_u = 0.0, e_v = 0.0, var_v = 0.0, e_w = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double r = res.r[i];
        const auto& c = m.coords[i];
        std::vector<double> lr(3), v(2), w(2);
        for (int j = 0; j < 2; ++j) {
            const double ml = std::pow(c.x0_marginal[j], lam);
            lr[j] = std::log(1.0 - r + r / ml);
            v[j] = -r * std::log(c.x0_marginal[j]) / ((1.0 - r) * ml + r);
            w[j] = r * (1.0 - r) * std::pow(std::log(c.x0_marginal[j]), 2.0) /
                   std::pow((1.0 - r) * ml + r, 2.0);
        }
        lr[2] = std::log(1.0 - r);
        const std::vector<double> pj{c.diag_joint[0], c.diag_joint[1], c.disagreement_mass()};
        double mu = 0.0, mv = 0.0;
        for (int j = 0; j < 3; ++j) mu += pj[j] * lr[j];
        for (int j = 0; j < 2; ++j) mv += pj[j] * v[j];
        e_u += mu;
        e_v += mv;
        for (int j = 0; j < 3; ++j) var_u += pj[j] * (lr[j] - mu) * (lr[j] - mu);
        for (int j = 0; j < 2; ++j) var_v += pj[j] * (v[j] - mv) * (v[j] - mv);
        for (int j = 0; j < 2; ++j) e_w += pj[j] * w[j];
    }
    CHECK(res.e_u == doctest::Approx(e_u).epsilon(1e-10));
    CHECK(res.var_u == doctest::Approx(var_u).epsilon(1e-10));
    CHECK(res.e_v == doctest::Approx(e_v).epsilon(1e-10));
    CHECK(res.var_v == doctest::Approx(var_v).epsilon(1e-10));
    CHECK(res.e_w == doctest::Approx(e_w).epsilon(1e-10));

    const double ln_n = std::log(res.big_n);
    const double e2d = 0.5 * 0.5 * 0.05;
    CHECK(res.conditions_ok[0] == (var_u <= e2d * lam * lam * ln_n * ln_n));
    CHECK(res.conditions_ok[1] == (var_v <= e2d * ln_n * ln_n / 4.0));
    CHECK(res.conditions_ok[2] == (e_w <= e2d * ln_n * ln_n / 8.0));
}
