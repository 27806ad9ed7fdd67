#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lexforest/model.hpp"
#include "lexforest/presets.hpp"
#include "test_support.hpp"

using namespace lexf;

TEST_CASE("degenerate single-value model generates constant data") {
    DataModel m;
    m.coords.push_back(CoordinateDistribution{{0.0, 1.0}, {0.0, 1.0}, std::vector<double>{0.0, 1.0}});
    m.n0 = 50;
    m.n1 = 50;
    const Dataset ds = generate_instance(m, 1);
    for (auto v : ds.x0_values) CHECK(v == 1);
    for (auto v : ds.x1_values) CHECK(v == 1);
    REQUIRE(ds.planted.has_value());
    CHECK(ds.x0_point(ds.planted->x0_index)[0] == ds.x1_point(ds.planted->x1_index)[0]);
}

TEST_CASE("generation is a pure function of (model, seed)") {
    DataModel m = bernoulli_model(0.8, 16, 64, 64);
    const Dataset a = generate_instance(m, 42);
    const Dataset b = generate_instance(m, 42);
    const Dataset c = generate_instance(m, 43);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("planted-pair coordinate agreement matches the diagonal") {
    // d=2, b=2, p_{1*}=0.5, p_{11}=0.4 per coordinate
    DataModel m;
    CoordinateDistribution c{{0.1, 0.4}, {0.5, 0.5}, std::nullopt};
    m.coords = {c, c};
    m.n0 = 2;
    m.n1 = 2;
    const int reps = 100000;
    int agree1[2] = {0, 0};
    for (int rep = 0; rep < reps; ++rep) {
        const Dataset ds = generate_instance(m, 1000 + rep);
        auto a = ds.x0_point(ds.planted->x0_index);
        auto b = ds.x1_point(ds.planted->x1_index);
        for (int i = 0; i < 2; ++i)
            if (a[i] == 1 && b[i] == 1) ++agree1[i];
    }
    const double sigma = std::sqrt(0.4 * 0.6 / reps);
    for (int i = 0; i < 2; ++i) {
        const double freq = static_cast<double>(agree1[i]) / reps;
        CHECK(std::abs(freq - 0.4) <= 3.0 * sigma);
    }
}

TEST_CASE("independent diagonal makes the planted pair look random") {
    // p_j = p_{j*} p_{*j}: planted x1 coordinate distributed like any other
    DataModel m;
    m.coords.push_back(CoordinateDistribution{
        {0.6 * 0.6, 0.4 * 0.4}, {0.6, 0.4}, std::vector<double>{0.6, 0.4}});
    m.n0 = 4;
    m.n1 = 4;
    const int reps = 100000;
    int ones = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const Dataset ds = generate_instance(m, 777000 + rep);
        ones += ds.x1_point(ds.planted->x1_index)[0];
    }
    // chi-square against the marginal 0.4 with one degree of freedom
    const double expected1 = 0.4 * reps;
    const double expected0 = 0.6 * reps;
    const double chi2 = std::pow(ones - expected1, 2.0) / expected1 +
                        std::pow((reps - ones) - expected0, 2.0) / expected0;
    CHECK(chi2 < 10.83);  // 99.9% quantile, 1 dof
}

TEST_CASE("generated marginals converge to the model") {
    DataModel m = bernoulli_model(0.9, 4, 100000, 2);
    const Dataset ds = generate_instance(m, 5);
    for (std::size_t i = 0; i < 4; ++i) {
        std::int64_t ones = 0;
        for (std::size_t p = 0; p < ds.n0(); ++p) ones += ds.x0_point(p)[i];
        const double freq = static_cast<double>(ones) / static_cast<double>(ds.n0());
        const double sigma = std::sqrt(0.25 / static_cast<double>(ds.n0()));
        CHECK(std::abs(freq - 0.5) <= 3.0 * sigma);
    }
}

TEST_CASE("generation errors") {
    DataModel m = bernoulli_model(0.8, 4, 4, 4);
    m.n0 = 0;
    CHECK_THROWS_AS(generate_instance(m, 1), std::invalid_argument);
    m.n0 = 4;
    CHECK_THROWS_AS(generate_instance(m, 1, /*strict=*/true), std::invalid_argument);
}

TEST_CASE("estimate_model point mass") {
    std::vector<PointPair> pairs{{{0}, {0}}};
    const DataModel m = estimate_model(pairs, 0.0);
    CHECK(m.coords[0].x0_marginal[0] == doctest::Approx(1.0));
    CHECK(m.coords[0].diag_joint[0] == doctest::Approx(1.0));
    CHECK(m.coords[0].diag_joint[1] == doctest::Approx(0.0));
}

TEST_CASE("estimate_model exact agreement") {
    std::vector<PointPair> pairs{{{0}, {0}}, {{1}, {1}}};
    const DataModel m = estimate_model(pairs, 0.0);
    CHECK(m.coords[0].x0_marginal[0] == doctest::Approx(0.5));
    CHECK(m.coords[0].x0_marginal[1] == doctest::Approx(0.5));
    CHECK(m.coords[0].diag_joint[0] == doctest::Approx(0.5));
    CHECK(m.coords[0].diag_joint[1] == doctest::Approx(0.5));
    CHECK(m.coords[0].disagreement_mass() == doctest::Approx(0.0));
}

TEST_CASE("estimate_model recovers a known model") {
    DataModel truth;
    CoordinateDistribution c{{0.5, 0.25}, {0.625, 0.375}, std::nullopt};
    truth.coords = {c, c, c};
    truth.n0 = truth.n1 = 2;

    // build pairs by generating tiny instances and reading the planted pair
    std::vector<PointPair> pairs;
    for (int rep = 0; rep < 10000; ++rep) {
        const Dataset ds = generate_instance(truth, 90000 + rep);
        auto a = ds.x0_point(ds.planted->x0_index);
        auto b = ds.x1_point(ds.planted->x1_index);
        pairs.push_back(PointPair{{a.begin(), a.end()}, {b.begin(), b.end()}});
    }
    const DataModel est = estimate_model(pairs, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(est.coords[i].diag_joint[j] - truth.coords[i].diag_joint[j]) <= 0.02);
            CHECK(std::abs(est.coords[i].x0_marginal[j] - truth.coords[i].x0_marginal[j]) <= 0.02);
        }
    }
}

TEST_CASE("estimate_model keeps the diagonal below the marginal with smoothing") {
    std::vector<PointPair> pairs{{{0}, {0}}};
    const DataModel m = estimate_model(pairs, 1.0);
    m.coords[0].validate();
    CHECK(m.coords[0].diag_joint[0] <= m.coords[0].x0_marginal[0] + 1e-15);
}

TEST_CASE("estimate_model errors") {
    CHECK_THROWS_AS(estimate_model({}, 0.0), std::invalid_argument);
    std::vector<PointPair> bad{{{0, 1}, {0}}};
    CHECK_THROWS_AS(estimate_model(bad, 0.0), std::invalid_argument);
}

TEST_CASE("dense dataset round trip") {
    DataModel m = unlimited_model(5, 3, 4);
    const Dataset ds = generate_instance(m, 9);
    std::stringstream ss;
    write_dataset(ds, ss);
    const Dataset back = read_dataset(ss, "roundtrip");
    CHECK(back == ds);
}

TEST_CASE("sparse dataset round trip including empty points") {
    Dataset ds;
    ds.layout = Dataset::Layout::sparse;
    ds.dim = 50;
    ds.x0_features = {{3, 7, 42}, {}};
    ds.x1_features = {{0, 49}};
    ds.planted = PlantedPair{1, 0};
    std::stringstream ss;
    write_dataset(ds, ss);
    const Dataset back = read_dataset(ss, "roundtrip");
    CHECK(back == ds);
}

TEST_CASE("sparse reader normalizes feature order") {
    std::stringstream ss("#sparse d=50\n7 42 3\n#x1\n1\n");
    const Dataset ds = read_dataset(ss, "t");
    CHECK(ds.x0_features[0] == std::vector<std::uint32_t>{3, 7, 42});
}

TEST_CASE("dataset reader errors carry line numbers") {
    {
        std::stringstream ss("#dense d=2 b=2,2\n0 1\n1 2\n#x1\n0 0\n");
        try {
            read_dataset(ss, "bad");
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("bad:3") != std::string::npos);
        }
    }
    {
        std::stringstream ss("#sparse d=10\n3 99\n#x1\n1\n");
        try {
            read_dataset(ss, "bad");
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("bad:2") != std::string::npos);
            CHECK(std::string(e.what()).find("99") != std::string::npos);
        }
    }
    {
        std::stringstream ss("0 1\n");
        CHECK_THROWS_AS(read_dataset(ss, "noheader"), std::invalid_argument);
    }
}

TEST_CASE("model file round trip") {
    std::mt19937_64 rng(3);
    DataModel m = test::random_model(rng, 6, 4);
    m.coords[2].x1_marginal = m.coords[2].x0_marginal;
    std::stringstream ss;
    write_model(m, ss);
    const DataModel back = read_model(ss, "roundtrip");
    REQUIRE(back.coords.size() == m.coords.size());
    for (std::size_t i = 0; i < m.coords.size(); ++i) CHECK(back.coords[i] == m.coords[i]);
}

TEST_CASE("model reader rejects bad lines with location") {
    std::stringstream ss("2 0.4 0.4 | 0.5 0.6\n");
    try {
        read_model(ss, "m");
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("m:1") != std::string::npos);
    }
}

TEST_CASE("dense/sparse conversions invert each other") {
    DataModel m = sparse_model(0.2, 0.15, 12, 20, 20);
    const Dataset dense = generate_instance(m, 4);
    const Dataset sparse = to_sparse(dense);
    CHECK(to_dense(sparse, dense.dim) == dense);
}

TEST_CASE("presets parse") {
    const DataModel b = model_from_spec("bernoulli:p=0.9,d=64", 128, 256);
    CHECK(b.dimension() == 64);
    CHECK(b.n0 == 128);
    CHECK(b.coords[0].diag_joint[0] == doctest::Approx(0.45));

    const DataModel u = model_from_spec("unlimited:d=8");
    CHECK(u.coords[0].x0_marginal[0] == doctest::Approx(0.625));

    const DataModel s = model_from_spec("sparse:d=16,p1=0.05,p11=0.04");
    CHECK(s.coords[0].diag_joint[1] == doctest::Approx(0.04));
    CHECK(s.coords[0].disagreement_mass() == doctest::Approx(0.02));

    const DataModel g = model_from_spec("grouped:groups=0.9x3+0.7x2");
    CHECK(g.dimension() == 5);
    CHECK(g.coords[0].diag_joint[0] == doctest::Approx(0.45));
    CHECK(g.coords[4].diag_joint[0] == doctest::Approx(0.35));

    CHECK_THROWS_AS(model_from_spec("bernoulli:d=64"), std::invalid_argument);
}
