#pragma once

#include <cstdint>
#include <string>

#include "lexforest/model.hpp"

namespace lexf {

/// Homogeneous marginally Bernoulli(1/2) coordinates with agreement
/// probability p (diagonal p/2, p/2; marginals 1/2, 1/2).
DataModel bernoulli_model(double p, std::size_t d, std::int64_t n0 = 1, std::int64_t n1 = 1);

/// The unlimited-data example: p00=1/2, p11=1/4, p01=p10=1/8 per coordinate.
DataModel unlimited_model(std::size_t d, std::int64_t n0 = 1, std::int64_t n1 = 1);

/// Homogeneous sparse binary coordinates from (p1*, p11) with symmetric
/// off-diagonals p01 = p10 = p1* - p11.
DataModel sparse_model(double p1_star, double p11, std::size_t d, std::int64_t n0 = 1,
                       std::int64_t n1 = 1);

/// Marginally Bernoulli(1/2) coordinates in groups of equal agreement
/// probability, e.g. groups {{0.9, 16}, {0.8, 32}}.
struct CoordinateGroup {
    double p;
    std::size_t count;
};
DataModel grouped_model(const std::vector<CoordinateGroup>& groups, std::int64_t n0 = 1,
                        std::int64_t n1 = 1);

/// Parse a preset string ("bernoulli:p=0.9,d=64", "unlimited:d=4096",
/// "sparse:d=4096,p1=0.05,p11=0.0475", "grouped:groups=0.9x16+0.8x32") or,
/// when no known prefix matches, load a model file from that path.
DataModel model_from_spec(const std::string& spec, std::int64_t n0 = 1, std::int64_t n1 = 1);

}  // namespace lexf
