#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lexforest/exponent.hpp"
#include "lexforest/exponents.hpp"
#include "lexforest/model.hpp"

namespace lexf {

/// One try's randomness: per-coordinate uniforms r_i, their random
/// exponents, and the induced coordinate order (finite exponents ascending,
/// ties by index; infinite-exponent coordinates are dropped).
struct TryPlan {
    std::int64_t try_index = 0;
    std::vector<double> r;
    std::vector<Exponent> lambdas;
    std::vector<std::uint32_t> order;

    std::size_t usable_count() const { return order.size(); }
};

TryPlan make_try_plan(const DataModel& model, std::uint64_t master_seed, std::int64_t t);

struct SearchConfig {
    std::int64_t window = 4;        // a: X0 neighbors compared on each side
    std::int64_t tries = -1;        // -1 = auto budget from the theory
    std::uint64_t master_seed = 0;
    double score_floor = -1e300;
    bool stop_on_planted = false;
    bool compute_scores = true;     // benches can skip candidate scoring
    bool collect_candidates = true; // benches can skip the candidate merge
    bool swap_sides = false;        // run with X0 and X1 roles exchanged
    std::int64_t auto_cap = 1'000'000;
    std::optional<double> epsilon;  // with delta: auto budget via plan_tries
    std::optional<double> delta;
    SparseMode sparse_mode = SparseMode::conservative;  // sparse_search only
    bool sparse_exact = false;      // sparse_search: solve exponents exactly
};

struct Candidate {
    std::uint32_t x0_index = 0;
    std::uint32_t x1_index = 0;
    double score = 0.0;
    std::int64_t first_try_seen = 0;
};

struct TryStats {
    std::int64_t comparisons = 0;
    std::size_t usable_coords = 0;
    double mean_prefix_len = 0.0;
    std::int64_t max_prefix_len = 0;
    bool planted_compared = false;
};

struct SearchReport {
    std::int64_t tries_executed = 0;
    std::int64_t total_comparisons = 0;
    std::vector<Candidate> candidates;  // deduplicated, score-descending
    bool success = false;
    std::vector<TryStats> per_try;
};

/// One lexicographic try: sort all points by the plan's coordinate order and
/// compare every X1 point with the window of nearest X0 points on each side.
/// Performs at most 2 a n1 comparisons.
std::pair<std::vector<Candidate>, TryStats> run_try(const Dataset& dataset,
                                                    const DataModel& model,
                                                    const TryPlan& plan,
                                                    const SearchConfig& config);

/// The full randomized lexicographic forest search (dense datasets).
SearchReport search(const Dataset& dataset, const DataModel& model, const SearchConfig& config);

/// Sparse path: points are feature sets; exponents are hashed per try and
/// per feature, with the conservative closed form or the exact solver.
SearchReport sparse_search(const Dataset& dataset, const DataModel& model,
                           const SearchConfig& config);

/// Classic baseline: per try pick k coordinates uniformly, bucket by exact
/// agreement, compare all X0 x X1 pairs inside each bucket.
SearchReport classic_search(const Dataset& dataset, double p, std::int64_t k,
                            const SearchConfig& config);

struct GreedyTrainedResult {
    SearchReport report;
    std::vector<std::vector<std::uint32_t>> orders;  // one per training round
    std::size_t remaining_after = 0;
    bool stalled = false;  // a round separated nothing
};

/// Trained variant: estimate the model from training pairs, order coordinates
/// by ascending greedy exponent, peel found pairs, repeat until the training
/// set shrinks to a third, then apply the learned orders to the dataset.
GreedyTrainedResult greedy_trained_search(const std::vector<PointPair>& train,
                                          const Dataset& dataset, const SearchConfig& config);

using Scorer = std::function<double(const Dataset&, std::size_t i0, std::size_t i1)>;

/// Rarity-weighted agreement: sum of ln(1/p_{j*}) over coordinates where the
/// two points share value j.
Scorer rarity_scorer(const DataModel& model);
/// Plain agreement count.
Scorer agreement_scorer();

struct BrutePair {
    std::uint32_t x0_index = 0;
    std::uint32_t x1_index = 0;
    double score = 0.0;
};

/// Exact best pair under the scorer; ties broken by smallest (i0, i1).
BrutePair brute_force(const Dataset& dataset, const Scorer& scorer);

/// Diagnostic [0,1] projection of a point under a try's order; monotone with
/// the lexicographic order and near-uniform for large d.
double projection_value(std::span<const std::uint16_t> point, const DataModel& model,
                        const TryPlan& plan);

void write_report_json(const SearchReport& report, std::ostream& out);
void write_candidates_csv(const SearchReport& report, std::ostream& out);

}  // namespace lexf
