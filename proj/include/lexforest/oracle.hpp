#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lexforest/model.hpp"

namespace lexf {

/// A bucketing-tree leaf: per coordinate either the taken value or the
/// alphabet size b_i meaning "coordinate not taken".
struct LeafSpec {
    std::vector<std::uint16_t> w;
    bool operator==(const LeafSpec&) const = default;
};

using BucketingTree = std::vector<LeafSpec>;

struct BucketingForest {
    std::vector<BucketingTree> trees;
};

/// Exact forest success probability by enumeration of the abbreviated state
/// y of the special pair. Guarded: prod_i (b_i + 1) must not exceed 1e7.
double forest_success_probability(const DataModel& model, const BucketingForest& forest);

/// Sum over leaves of prod_{i taken} p_{i, w_i}.
double tree_success_probability(const DataModel& model, const BucketingTree& tree);

/// Expected X0 occupancy n0 * prod_{i taken} p_{i, w_i*}.
double leaf_occupancy(const DataModel& model, const LeafSpec& leaf, std::int64_t n0);

/// Split recursively in the given coordinate order, closing each branch as
/// soon as its expected X0 occupancy is at most a. Mirrors the bucket
/// structure of one engine try at that order.
BucketingTree build_capped_tree(const DataModel& model, std::int64_t n0, std::int64_t a,
                                std::span<const std::uint32_t> split_order);

BucketingForest read_forest(const std::filesystem::path& path, const DataModel& model);
BucketingForest read_forest(std::istream& in, const DataModel& model,
                            const std::string& origin = "<stream>");
void write_forest(const BucketingForest& forest, const DataModel& model, std::ostream& out);

}  // namespace lexf
