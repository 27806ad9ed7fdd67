#include "lexforest/presets.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lexf {

namespace {

CoordinateDistribution bernoulli_coord(double p) {
    if (!(p >= 0.5 && p <= 1.0))
        throw std::invalid_argument("bernoulli preset: p must be in [1/2, 1]");
    CoordinateDistribution c;
    c.diag_joint = {p / 2.0, p / 2.0};
    c.x0_marginal = {0.5, 0.5};
    return c;
}

}  // namespace

DataModel bernoulli_model(double p, std::size_t d, std::int64_t n0, std::int64_t n1) {
    DataModel m;
    m.coords.assign(d, bernoulli_coord(p));
    m.n0 = n0;
    m.n1 = n1;
    m.validate();
    return m;
}

DataModel unlimited_model(std::size_t d, std::int64_t n0, std::int64_t n1) {
    CoordinateDistribution c;
    c.diag_joint = {0.5, 0.25};     // p00, p11
    c.x0_marginal = {0.625, 0.375};
    DataModel m;
    m.coords.assign(d, c);
    m.n0 = n0;
    m.n1 = n1;
    m.validate();
    return m;
}

DataModel sparse_model(double p1_star, double p11, std::size_t d, std::int64_t n0,
                       std::int64_t n1) {
    if (!(p1_star > 0.0 && p1_star < 0.5))
        throw std::invalid_argument("sparse preset: p1* must be in (0, 1/2)");
    if (!(p11 > 0.0 && p11 <= p1_star))
        throw std::invalid_argument("sparse preset: p11 must be in (0, p1*]");
    CoordinateDistribution c;
    const double p00 = 1.0 - 2.0 * p1_star + p11;
    c.diag_joint = {p00, p11};
    c.x0_marginal = {1.0 - p1_star, p1_star};
    DataModel m;
    m.coords.assign(d, c);
    m.n0 = n0;
    m.n1 = n1;
    m.validate();
    return m;
}

DataModel grouped_model(const std::vector<CoordinateGroup>& groups, std::int64_t n0,
                        std::int64_t n1) {
    DataModel m;
    for (const auto& g : groups) {
        if (g.count == 0) throw std::invalid_argument("grouped preset: empty group");
        for (std::size_t i = 0; i < g.count; ++i) m.coords.push_back(bernoulli_coord(g.p));
    }
    m.n0 = n0;
    m.n1 = n1;
    m.validate();
    return m;
}

namespace {

// "key=value,key=value" body parser for preset strings.
double get_num(const std::string& body, const std::string& key, double fallback,
               bool required = false) {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        if (item.substr(0, eq) == key) return std::stod(item.substr(eq + 1));
    }
    if (required) throw std::invalid_argument("preset: missing parameter '" + key + "'");
    return fallback;
}

std::string get_str(const std::string& body, const std::string& key) {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
    }
    throw std::invalid_argument("preset: missing parameter '" + key + "'");
}

}  // namespace

DataModel model_from_spec(const std::string& spec, std::int64_t n0, std::int64_t n1) {
    const auto colon = spec.find(':');
    const std::string head = colon == std::string::npos ? "" : spec.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (head == "bernoulli") {
        return bernoulli_model(get_num(body, "p", 0, true),
                               static_cast<std::size_t>(get_num(body, "d", 0, true)), n0, n1);
    }
    if (head == "unlimited") {
        return unlimited_model(static_cast<std::size_t>(get_num(body, "d", 0, true)), n0, n1);
    }
    if (head == "sparse") {
        return sparse_model(get_num(body, "p1", 0, true), get_num(body, "p11", 0, true),
                            static_cast<std::size_t>(get_num(body, "d", 0, true)), n0, n1);
    }
    if (head == "grouped") {
        // groups=0.9x16+0.8x32
        const std::string gs = get_str(body, "groups");
        std::vector<CoordinateGroup> groups;
        std::stringstream ss(gs);
        std::string item;
        while (std::getline(ss, item, '+')) {
            const auto x = item.find('x');
            if (x == std::string::npos)
                throw std::invalid_argument("grouped preset: expected <p>x<count>");
            groups.push_back(CoordinateGroup{std::stod(item.substr(0, x)),
                                             static_cast<std::size_t>(std::stoul(item.substr(x + 1)))});
        }
        return grouped_model(groups, n0, n1);
    }
    DataModel m = read_model(std::filesystem::path(spec));
    m.n0 = n0;
    m.n1 = n1;
    return m;
}

}  // namespace lexf
