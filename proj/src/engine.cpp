#include "lexforest/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "lexforest/errors.hpp"
#include "lexforest/information.hpp"
#include "lexforest/rng.hpp"

namespace lexf {

namespace {

enum : std::uint64_t { kClassicStream = 0xc1a551cULL };

std::uint64_t pair_key(std::uint32_t i0, std::uint32_t i1) {
    return (static_cast<std::uint64_t>(i0) << 32) | i1;
}

// ---------------------------------------------------------------------------
// Windowed adjacency core shared by the dense, sparse and trained paths.
// `less(a, b)` orders point ids (X0 points are 0..n0-1, X1 points follow);
// `emit(i0, i1)` receives each requested comparison.
// ---------------------------------------------------------------------------
template <typename Less, typename Emit>
void windowed_pass(std::size_t n0, std::size_t n1, std::int64_t window, Less&& less,
                   Emit&& emit) {
    std::vector<std::uint32_t> ids(n0 + n1);
    std::iota(ids.begin(), ids.end(), 0u);
    std::sort(ids.begin(), ids.end(), less);

    std::vector<std::uint32_t> x0_order;  // X0 ids in sorted order
    x0_order.reserve(n0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> x1_at;  // (x0 seen, x1 id)
    x1_at.reserve(n1);
    for (auto id : ids) {
        if (id < n0)
            x0_order.push_back(id);
        else
            x1_at.emplace_back(static_cast<std::uint32_t>(x0_order.size()),
                               static_cast<std::uint32_t>(id - n0));
    }
    const auto w = static_cast<std::size_t>(window);
    for (auto [before, i1] : x1_at) {
        const std::size_t lo = before > w ? before - w : 0;
        const std::size_t hi = std::min(x0_order.size(), static_cast<std::size_t>(before) + w);
        for (std::size_t t = lo; t < hi; ++t) emit(x0_order[t], i1);
    }
}

struct DenseView {
    const Dataset* ds;
    std::span<const std::uint16_t> point(std::uint32_t id) const {
        return id < ds->n0() ? ds->x0_point(id) : ds->x1_point(id - ds->n0());
    }
};

double rarity_score_dense(const Dataset& ds, const DataModel& model, std::uint32_t i0,
                          std::uint32_t i1) {
    auto a = ds.x0_point(i0);
    auto b = ds.x1_point(i1);
    double s = 0.0;
    for (std::size_t c = 0; c < ds.dim; ++c)
        if (a[c] == b[c]) s += std::log(1.0 / model.coords[c].x0_marginal[a[c]]);
    return s;
}

std::int64_t common_prefix(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
                           const std::vector<std::uint32_t>& order) {
    std::int64_t len = 0;
    for (auto c : order) {
        if (a[c] != b[c]) break;
        ++len;
    }
    return len;
}

// Accumulates one try's emissions into candidates and stats.
struct TryCollector {
    const SearchConfig* cfg;
    const Dataset* ds;
    bool collect;
    std::vector<Candidate> cands;
    TryStats stats;
    std::int64_t try_index = 0;
    double prefix_sum = 0.0;

    void note(std::uint32_t i0, std::uint32_t i1, double score, std::int64_t prefix) {
        ++stats.comparisons;
        if (ds->planted && ds->planted->x0_index == i0 && ds->planted->x1_index == i1)
            stats.planted_compared = true;
        prefix_sum += static_cast<double>(prefix);
        stats.max_prefix_len = std::max(stats.max_prefix_len, prefix);
        if (collect && score >= cfg->score_floor)
            cands.push_back(Candidate{i0, i1, score, try_index});
    }

    void finish() {
        if (stats.comparisons > 0)
            stats.mean_prefix_len = prefix_sum / static_cast<double>(stats.comparisons);
    }
};

void check_budget(const TryStats& stats, std::int64_t window, std::size_t n1) {
    if (stats.comparisons > 2 * window * static_cast<std::int64_t>(n1))
        throw std::logic_error("engine: per-try comparison budget 2 a n1 exceeded");
}

// Dense try executor. Sorting with a naive row-major comparator costs two
// scattered reads per probed coordinate; instead each try extracts a short
// contiguous key prefix per point (one cache line) and only falls back to
// per-coordinate lookups for points tied through the whole prefix. A search
// reuses one instance across tries and pays a single blocked transpose so
// the prefix extraction streams column-wise.
class DenseTryRunner {
public:
    static constexpr std::size_t kPrefix = 32;

    DenseTryRunner(const Dataset& ds, bool build_columns)
        : ds_(ds), n0_(ds.n0()), n1_(ds.n1()), n_(n0_ + n1_), dim_(ds.dim) {
        if (build_columns) {
            columns_.resize(n_ * dim_);
            constexpr std::size_t tile = 64;
            for (std::size_t c0 = 0; c0 < dim_; c0 += tile)
                for (std::size_t i0 = 0; i0 < n_; i0 += tile) {
                    const std::size_t c1 = std::min(dim_, c0 + tile);
                    const std::size_t i1 = std::min(n_, i0 + tile);
                    for (std::size_t id = i0; id < i1; ++id) {
                        const std::uint16_t* row = row_of(static_cast<std::uint32_t>(id));
                        for (std::size_t c = c0; c < c1; ++c)
                            columns_[c * n_ + id] = row[c];
                    }
                }
        }
    }

    std::pair<std::vector<Candidate>, TryStats> run(const DataModel& model,
                                                    const std::vector<std::uint32_t>& order,
                                                    std::size_t usable_count,
                                                    std::int64_t try_index,
                                                    const SearchConfig& config) {
        const std::size_t klen = std::min(kPrefix, order.size());
        keys_.resize(n_ * kPrefix);
        if (!columns_.empty()) {
            for (std::size_t id = 0; id < n_; ++id) {
                std::uint16_t* key = keys_.data() + id * kPrefix;
                for (std::size_t k = 0; k < klen; ++k)
                    key[k] = columns_[static_cast<std::size_t>(order[k]) * n_ + id];
            }
        } else {
            for (std::size_t id = 0; id < n_; ++id) {
                const std::uint16_t* row = row_of(static_cast<std::uint32_t>(id));
                std::uint16_t* key = keys_.data() + id * kPrefix;
                for (std::size_t k = 0; k < klen; ++k) key[k] = row[order[k]];
            }
        }

        TryCollector col{&config, &ds_, config.collect_candidates, {}, {}, try_index, 0.0};
        col.stats.usable_coords = usable_count;
        windowed_pass(
            n0_, n1_, config.window,
            [&](std::uint32_t a, std::uint32_t b) {
                const std::uint16_t* ka = keys_.data() + static_cast<std::size_t>(a) * kPrefix;
                const std::uint16_t* kb = keys_.data() + static_cast<std::size_t>(b) * kPrefix;
                for (std::size_t k = 0; k < klen; ++k)
                    if (ka[k] != kb[k]) return ka[k] < kb[k];
                for (std::size_t k = klen; k < order.size(); ++k) {
                    const std::uint16_t va = value(a, order[k]), vb = value(b, order[k]);
                    if (va != vb) return va < vb;
                }
                return a < b;
            },
            [&](std::uint32_t i0, std::uint32_t i1) {
                double score = 0.0;
                std::int64_t prefix = 0;
                if (config.compute_scores) {
                    score = rarity_score_dense(ds_, model, i0, i1);
                    prefix = common_prefix(ds_.x0_point(i0), ds_.x1_point(i1), order);
                }
                col.note(i0, i1, score, prefix);
            });
        col.finish();
        check_budget(col.stats, config.window, n1_);
        return {std::move(col.cands), col.stats};
    }

private:
    const std::uint16_t* row_of(std::uint32_t id) const {
        return id < n0_ ? ds_.x0_values.data() + static_cast<std::size_t>(id) * dim_
                        : ds_.x1_values.data() + static_cast<std::size_t>(id - n0_) * dim_;
    }
    std::uint16_t value(std::uint32_t id, std::uint32_t c) const {
        if (!columns_.empty()) return columns_[static_cast<std::size_t>(c) * n_ + id];
        return row_of(id)[c];
    }

    const Dataset& ds_;
    std::size_t n0_, n1_, n_, dim_;
    std::vector<std::uint16_t> columns_;
    std::vector<std::uint16_t> keys_;
};

// Sparse comparison key: the point's usable features ordered by exponent
// rank. After the common prefix the point whose next feature has the larger
// rank sorts first (it has a zero where the other has a one); a point that
// runs out of features first sorts first.
struct SparseKeys {
    std::vector<std::uint32_t> buf;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> span_of;  // offset, length

    std::span<const std::uint32_t> ranks(std::uint32_t id) const {
        auto [off, len] = span_of[id];
        return {buf.data() + off, len};
    }
};

bool sparse_less(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] > b[i];
    return a.size() < b.size();
}

std::int64_t sparse_prefix(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return static_cast<std::int64_t>(i);
}

struct SparseScoreTables {
    std::vector<double> w0, w1;  // ln(1/p_{0*}), ln(1/p_{1*}) per feature
    double total0 = 0.0;
    std::vector<double> point_w0_x0, point_w0_x1;  // per-point sum of w0 over features

    static SparseScoreTables build(const Dataset& ds, const DataModel& model) {
        SparseScoreTables t;
        const std::size_t d = model.dimension();
        t.w0.resize(d);
        t.w1.resize(d);
        for (std::size_t f = 0; f < d; ++f) {
            t.w0[f] = std::log(1.0 / model.coords[f].x0_marginal[0]);
            t.w1[f] = std::log(1.0 / model.coords[f].x0_marginal[1]);
            t.total0 += t.w0[f];
        }
        auto sums = [&](const std::vector<std::vector<std::uint32_t>>& side,
                        std::vector<double>& out) {
            out.resize(side.size());
            for (std::size_t p = 0; p < side.size(); ++p) {
                double s = 0.0;
                for (auto f : side[p]) s += t.w0[f];
                out[p] = s;
            }
        };
        sums(ds.x0_features, t.point_w0_x0);
        sums(ds.x1_features, t.point_w0_x1);
        return t;
    }

    double score(const Dataset& ds, std::uint32_t i0, std::uint32_t i1) const {
        double s = total0 - point_w0_x0[i0] - point_w0_x1[i1];
        const auto& a = ds.x0_features[i0];
        const auto& b = ds.x1_features[i1];
        std::size_t ia = 0, ib = 0;
        while (ia < a.size() && ib < b.size()) {
            if (a[ia] == b[ib]) {
                s += w0[a[ia]] + w1[a[ia]];
                ++ia;
                ++ib;
            } else if (a[ia] < b[ib]) {
                ++ia;
            } else {
                ++ib;
            }
        }
        return s;
    }
};

// Exponent ranks for one try of the sparse path. Only features actually
// present in the data get an exponent, so a try costs O(sum |D_x| log).
struct SparseTryRanks {
    std::vector<std::uint32_t> rank_of;  // per feature; kUnusable when dropped
    static constexpr std::uint32_t kUnusable = 0xffffffffu;

    // Ranks taken verbatim from an existing coordinate order.
    SparseTryRanks(std::size_t dim, const std::vector<std::uint32_t>& order) {
        rank_of.assign(dim, kUnusable);
        for (std::size_t k = 0; k < order.size(); ++k)
            rank_of[order[k]] = static_cast<std::uint32_t>(k);
    }

    SparseTryRanks(const DataModel& model, const std::vector<std::uint32_t>& used,
                   std::uint64_t seed, std::int64_t t, const SearchConfig& cfg) {
        rank_of.assign(model.dimension(), kUnusable);
        std::vector<std::pair<double, std::uint32_t>> lam;
        lam.reserve(used.size());
        for (auto f : used) {
            const double r = try_uniform(seed, static_cast<std::uint64_t>(t), f);
            const auto& c = model.coords[f];
            if (cfg.sparse_exact) {
                Exponent e = random_exponent(c, r);
                if (e.is_finite()) lam.emplace_back(e.value(), f);
            } else {
                // Conservative closed form; a perfect feature (no
                // off-diagonal mass) gets exponent zero and always sorts
                // first.
                const double off = c.disagreement_mass();
                double l;
                if (off <= 0.0) {
                    l = 0.0;
                } else {
                    const double inv =
                        (1.0 - r) * (c.diag_joint[1] / off) * std::log(1.0 / c.x0_marginal[1]);
                    if (inv <= 0.0) continue;
                    l = 1.0 / inv;
                }
                lam.emplace_back(l, f);
            }
        }
        std::sort(lam.begin(), lam.end());
        for (std::size_t k = 0; k < lam.size(); ++k) rank_of[lam[k].second] = static_cast<std::uint32_t>(k);
    }
};

SparseKeys sparse_keys_for_try(const Dataset& ds, const SparseTryRanks& ranks) {
    SparseKeys keys;
    const std::size_t n0 = ds.n0(), n1 = ds.n1();
    keys.span_of.resize(n0 + n1);
    std::size_t total = 0;
    for (const auto& fs : ds.x0_features) total += fs.size();
    for (const auto& fs : ds.x1_features) total += fs.size();
    keys.buf.reserve(total);
    auto add = [&](const std::vector<std::uint32_t>& fs, std::size_t id) {
        const auto off = static_cast<std::uint32_t>(keys.buf.size());
        for (auto f : fs) {
            const auto rk = ranks.rank_of[f];
            if (rk != SparseTryRanks::kUnusable) keys.buf.push_back(rk);
        }
        auto* begin = keys.buf.data() + off;
        std::sort(begin, keys.buf.data() + keys.buf.size());
        keys.span_of[id] = {off, static_cast<std::uint32_t>(keys.buf.size()) - off};
    };
    for (std::size_t p = 0; p < n0; ++p) add(ds.x0_features[p], p);
    for (std::size_t q = 0; q < n1; ++q) add(ds.x1_features[q], n0 + q);
    return keys;
}

std::vector<std::uint32_t> used_features(const Dataset& ds) {
    std::vector<bool> seen(ds.dim, false);
    for (const auto* side : {&ds.x0_features, &ds.x1_features})
        for (const auto& fs : *side)
            for (auto f : fs) seen[f] = true;
    std::vector<std::uint32_t> out;
    for (std::size_t f = 0; f < ds.dim; ++f)
        if (seen[f]) out.push_back(static_cast<std::uint32_t>(f));
    return out;
}

std::pair<std::vector<Candidate>, TryStats> run_sparse_try(const Dataset& ds,
                                                           const SparseTryRanks& ranks,
                                                           std::size_t usable_count,
                                                           std::int64_t try_index,
                                                           const SearchConfig& cfg,
                                                           const SparseScoreTables* scores) {
    const std::size_t n0 = ds.n0(), n1 = ds.n1();
    SparseKeys keys = sparse_keys_for_try(ds, ranks);

    TryCollector col{&cfg, &ds, cfg.collect_candidates, {}, {}, try_index, 0.0};
    col.stats.usable_coords = usable_count;
    windowed_pass(
        n0, n1, cfg.window,
        [&](std::uint32_t a, std::uint32_t b) {
            if (sparse_less(keys.ranks(a), keys.ranks(b))) return true;
            if (sparse_less(keys.ranks(b), keys.ranks(a))) return false;
            return a < b;
        },
        [&](std::uint32_t i0, std::uint32_t i1) {
            double score = 0.0;
            std::int64_t prefix = 0;
            if (cfg.compute_scores && scores) {
                score = scores->score(ds, i0, i1);
                prefix = sparse_prefix(keys.ranks(i0), keys.ranks(static_cast<std::uint32_t>(n0 + i1)));
            }
            col.note(i0, i1, score, prefix);
        });
    col.finish();
    check_budget(col.stats, cfg.window, n1);
    return {std::move(col.cands), col.stats};
}

DataModel swapped_model(const DataModel& model) {
    DataModel out = model;
    out.n0 = model.n1;
    out.n1 = model.n0;
    for (auto& c : out.coords) {
        auto x0 = c.x0_marginal;
        c.x0_marginal = c.x1_marginal.value_or(x0);
        c.x1_marginal = std::move(x0);
    }
    return out;
}

Dataset swapped_dataset(const Dataset& ds) {
    Dataset out = ds;
    std::swap(out.x0_values, out.x1_values);
    std::swap(out.x0_features, out.x1_features);
    if (out.planted) std::swap(out.planted->x0_index, out.planted->x1_index);
    return out;
}

std::int64_t resolve_tries(const Dataset& ds, const DataModel& model, const SearchConfig& cfg) {
    if (cfg.tries >= 0) return cfg.tries;
    double ln_t;
    if (cfg.epsilon && cfg.delta) {
        ln_t = plan_tries(model, static_cast<std::int64_t>(ds.n0()), cfg.window, *cfg.epsilon,
                          *cfg.delta)
                   .ln_tries;
    } else {
        ln_t = cutoff_exponent(model, static_cast<std::int64_t>(ds.n0())).ln_tries;
    }
    const double t = std::ceil(std::exp(std::max(0.0, ln_t)));
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(t), 1, cfg.auto_cap);
}

struct CandidateMerger {
    std::unordered_map<std::uint64_t, std::size_t> index;
    std::vector<Candidate> merged;

    void add(const Candidate& c) {
        auto [it, fresh] = index.try_emplace(pair_key(c.x0_index, c.x1_index), merged.size());
        if (fresh) merged.push_back(c);
    }

    std::vector<Candidate> take() {
        std::sort(merged.begin(), merged.end(), [](const Candidate& a, const Candidate& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.x0_index != b.x0_index) return a.x0_index < b.x0_index;
            return a.x1_index < b.x1_index;
        });
        return std::move(merged);
    }
};

}  // namespace

TryPlan make_try_plan(const DataModel& model, std::uint64_t master_seed, std::int64_t t) {
    model.validate();
    const std::size_t d = model.dimension();
    TryPlan plan;
    plan.try_index = t;
    plan.r.resize(d);
    plan.lambdas.reserve(d);
    std::vector<std::pair<double, std::uint32_t>> finite;
    for (std::size_t i = 0; i < d; ++i) {
        plan.r[i] = try_uniform(master_seed, static_cast<std::uint64_t>(t), i);
        Exponent e = random_exponent(model.coords[i], plan.r[i]);
        plan.lambdas.push_back(e);
        if (e.is_finite()) finite.emplace_back(e.value(), static_cast<std::uint32_t>(i));
    }
    std::sort(finite.begin(), finite.end());
    plan.order.reserve(finite.size());
    for (auto& [lam, i] : finite) plan.order.push_back(i);
    return plan;
}

std::pair<std::vector<Candidate>, TryStats> run_try(const Dataset& dataset, const DataModel& model,
                                                    const TryPlan& plan,
                                                    const SearchConfig& config) {
    dataset.validate();
    model.validate();
    if (dataset.n0() == 0 || dataset.n1() == 0)
        throw std::invalid_argument("run_try: empty dataset side");
    if (config.window < 1) throw std::invalid_argument("run_try: window must be positive");

    if (dataset.layout == Dataset::Layout::sparse) {
        // Ranks follow the plan's order so the dense and sparse paths agree.
        SparseTryRanks ranks(model.dimension(), plan.order);
        SparseScoreTables tables;
        if (config.compute_scores) tables = SparseScoreTables::build(dataset, model);
        return run_sparse_try(dataset, ranks, plan.usable_count(), plan.try_index, config,
                              config.compute_scores ? &tables : nullptr);
    }

    DenseTryRunner runner(dataset, /*build_columns=*/false);
    return runner.run(model, plan.order, plan.usable_count(), plan.try_index, config);
}

namespace {

SearchReport forest_search_impl(const Dataset& dataset, const DataModel& model,
                                const SearchConfig& config, bool sparse_path) {
    dataset.validate();
    model.validate();
    if (dataset.n0() == 0 || dataset.n1() == 0)
        throw std::invalid_argument("search: empty dataset side");

    const std::int64_t tries = resolve_tries(dataset, model, config);
    SearchReport report;
    CandidateMerger merger;

    // All-identical coordinates with some disagreement mass have a strictly
    // increasing lambda(r), so sorting by r gives the exact exponent order
    // without d root-findings per try.
    const bool fast_homogeneous = !sparse_path && model.homogeneous() &&
                                  model.coords[0].disagreement_mass() > 0.0;
    const double agree_mass = model.coords[0].agreement_mass();
    const std::size_t d = model.dimension();

    std::vector<std::uint32_t> used;
    SparseScoreTables tables;
    if (sparse_path) {
        used = used_features(dataset);
        if (config.compute_scores) tables = SparseScoreTables::build(dataset, model);
    }

    std::vector<std::pair<double, std::uint32_t>> scratch;
    for (std::int64_t t = 0; t < tries; ++t) {
        std::vector<Candidate> cands;
        TryStats stats;
        if (sparse_path) {
            SparseTryRanks ranks(model, used, config.master_seed, t, config);
            std::size_t usable = 0;
            for (auto f : used)
                if (ranks.rank_of[f] != SparseTryRanks::kUnusable) ++usable;
            std::tie(cands, stats) =
                run_sparse_try(dataset, ranks, usable, t, config,
                               config.compute_scores ? &tables : nullptr);
        } else if (fast_homogeneous) {
            scratch.clear();
            for (std::size_t i = 0; i < d; ++i) {
                const double r = try_uniform(config.master_seed, static_cast<std::uint64_t>(t), i);
                if (r < agree_mass) scratch.emplace_back(r, static_cast<std::uint32_t>(i));
            }
            std::sort(scratch.begin(), scratch.end());
            TryPlan plan;
            plan.try_index = t;
            plan.order.reserve(scratch.size());
            for (auto& [r, i] : scratch) plan.order.push_back(i);
            std::tie(cands, stats) = run_try(dataset, model, plan, config);
        } else {
            TryPlan plan = make_try_plan(model, config.master_seed, t);
            plan.try_index = t;
            std::tie(cands, stats) = run_try(dataset, model, plan, config);
        }

        report.tries_executed = t + 1;
        report.total_comparisons += stats.comparisons;
        report.success = report.success || stats.planted_compared;
        report.per_try.push_back(stats);
        for (const auto& c : cands) merger.add(c);
        if (config.stop_on_planted && report.success) break;
    }
    report.candidates = merger.take();
    return report;
}

}  // namespace

SearchReport search(const Dataset& dataset, const DataModel& model, const SearchConfig& config) {
    if (config.swap_sides)
        return forest_search_impl(swapped_dataset(dataset), swapped_model(model), config,
                                  dataset.layout == Dataset::Layout::sparse);
    return forest_search_impl(dataset, model, config,
                              dataset.layout == Dataset::Layout::sparse);
}

SearchReport sparse_search(const Dataset& dataset, const DataModel& model,
                           const SearchConfig& config) {
    if (dataset.layout != Dataset::Layout::sparse)
        throw std::invalid_argument("sparse_search: dataset is not in sparse layout");
    for (const auto& c : model.coords)
        if (c.alphabet_size() != 2)
            throw std::invalid_argument("sparse_search: model must be binary");
    return forest_search_impl(dataset, model, config, true);
}

SearchReport classic_search(const Dataset& dataset, double p, std::int64_t k,
                            const SearchConfig& config) {
    dataset.validate();
    if (dataset.layout != Dataset::Layout::dense)
        throw std::invalid_argument("classic_search: dense data required");
    if (dataset.n0() == 0 || dataset.n1() == 0)
        throw std::invalid_argument("classic_search: empty dataset side");
    const auto d = static_cast<std::int64_t>(dataset.dim);
    if (k < 0 || k > d) throw std::invalid_argument("classic_search: k must be in [0, d]");
    (void)p;  // kept for symmetry with the analysis; bucketing needs only k

    const std::int64_t tries = std::max<std::int64_t>(config.tries, 0);
    const std::size_t n0 = dataset.n0(), n1 = dataset.n1();
    DenseView view{&dataset};

    SearchReport report;
    CandidateMerger merger;
    std::vector<std::uint32_t> coords(dataset.dim);

    for (std::int64_t t = 0; t < tries; ++t) {
        std::iota(coords.begin(), coords.end(), 0u);
        SplitMix64 rng(mix64(config.master_seed, kClassicStream, static_cast<std::uint64_t>(t)));
        for (std::int64_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::int64_t>(rng.next_below(dataset.dim - i));
            std::swap(coords[i], coords[j]);
        }
        std::span<const std::uint32_t> key(coords.data(), static_cast<std::size_t>(k));

        std::vector<std::uint32_t> ids(n0 + n1);
        std::iota(ids.begin(), ids.end(), 0u);
        std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
            auto pa = view.point(a), pb = view.point(b);
            for (auto c : key)
                if (pa[c] != pb[c]) return pa[c] < pb[c];
            return a < b;
        });

        TryStats stats;
        stats.usable_coords = static_cast<std::size_t>(k);
        std::size_t run_begin = 0;
        auto same_bucket = [&](std::uint32_t a, std::uint32_t b) {
            auto pa = view.point(a), pb = view.point(b);
            for (auto c : key)
                if (pa[c] != pb[c]) return false;
            return true;
        };
        for (std::size_t s = 1; s <= ids.size(); ++s) {
            if (s < ids.size() && same_bucket(ids[run_begin], ids[s])) continue;
            // bucket [run_begin, s)
            for (std::size_t u = run_begin; u < s; ++u) {
                if (ids[u] >= n0) continue;
                for (std::size_t v = run_begin; v < s; ++v) {
                    if (ids[v] < n0) continue;
                    const std::uint32_t i0 = ids[u];
                    const auto i1 = static_cast<std::uint32_t>(ids[v] - n0);
                    ++stats.comparisons;
                    if (dataset.planted && dataset.planted->x0_index == i0 &&
                        dataset.planted->x1_index == i1)
                        stats.planted_compared = true;
                    if (config.compute_scores) {
                        double score = 0.0;
                        auto pa = dataset.x0_point(i0), pb = dataset.x1_point(i1);
                        for (std::size_t c = 0; c < dataset.dim; ++c)
                            if (pa[c] == pb[c]) score += 1.0;
                        score *= std::log(2.0);
                        if (score >= config.score_floor)
                            merger.add(Candidate{i0, i1, score, t});
                    } else {
                        merger.add(Candidate{i0, i1, 0.0, t});
                    }
                }
            }
            run_begin = s;
        }
        report.tries_executed = t + 1;
        report.total_comparisons += stats.comparisons;
        report.success = report.success || stats.planted_compared;
        report.per_try.push_back(stats);
        if (config.stop_on_planted && report.success) break;
    }
    report.candidates = merger.take();
    return report;
}

GreedyTrainedResult greedy_trained_search(const std::vector<PointPair>& train,
                                          const Dataset& dataset, const SearchConfig& config) {
    if (train.empty()) throw std::invalid_argument("greedy_trained_search: no training pairs");
    dataset.validate();

    GreedyTrainedResult result;
    std::vector<std::size_t> remaining(train.size());
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    const std::size_t stop_size = (train.size() + 2) / 3;
    constexpr int kMaxRounds = 64;

    for (int round = 0; round < kMaxRounds && remaining.size() > stop_size; ++round) {
        std::vector<PointPair> live;
        live.reserve(remaining.size());
        for (auto idx : remaining) live.push_back(train[idx]);
        DataModel est = estimate_model(live, 1.0);

        std::vector<std::pair<double, std::uint32_t>> finite;
        for (std::size_t i = 0; i < est.dimension(); ++i) {
            Exponent e = greedy_exponent(est.coords[i]);
            if (e.is_finite()) finite.emplace_back(e.value(), static_cast<std::uint32_t>(i));
        }
        std::sort(finite.begin(), finite.end());
        if (finite.empty()) {
            result.stalled = true;
            break;
        }
        TryPlan plan;
        plan.try_index = round;
        plan.order.reserve(finite.size());
        for (auto& [lam, i] : finite) plan.order.push_back(i);
        result.orders.push_back(plan.order);

        // One windowed try over the surviving training pairs themselves.
        Dataset tds;
        tds.layout = Dataset::Layout::dense;
        tds.dim = est.dimension();
        tds.alphabet.resize(tds.dim);
        for (std::size_t i = 0; i < tds.dim; ++i)
            tds.alphabet[i] = static_cast<std::uint32_t>(est.coords[i].alphabet_size());
        tds.x0_values.reserve(live.size() * tds.dim);
        tds.x1_values.reserve(live.size() * tds.dim);
        for (const auto& pr : live) {
            tds.x0_values.insert(tds.x0_values.end(), pr.x0.begin(), pr.x0.end());
            tds.x1_values.insert(tds.x1_values.end(), pr.x1.begin(), pr.x1.end());
        }
        SearchConfig probe = config;
        probe.compute_scores = false;
        auto [cands, stats] = run_try(tds, est, plan, probe);

        std::vector<bool> found(remaining.size(), false);
        for (const auto& c : cands)
            if (c.x0_index == c.x1_index) found[c.x0_index] = true;
        std::vector<std::size_t> next;
        next.reserve(remaining.size());
        for (std::size_t i = 0; i < remaining.size(); ++i)
            if (!found[i]) next.push_back(remaining[i]);
        if (next.size() == remaining.size()) {
            result.stalled = true;  // nothing separated; further rounds would repeat
            break;
        }
        remaining = std::move(next);
    }
    result.remaining_after = remaining.size();

    // Apply the learned orders to the working dataset, one try per round.
    DataModel final_model = estimate_model(train, 1.0);
    CandidateMerger merger;
    for (std::size_t t = 0; t < result.orders.size(); ++t) {
        TryPlan plan;
        plan.try_index = static_cast<std::int64_t>(t);
        plan.order = result.orders[t];
        auto [cands, stats] = run_try(dataset, final_model, plan, config);
        result.report.tries_executed = static_cast<std::int64_t>(t + 1);
        result.report.total_comparisons += stats.comparisons;
        result.report.success = result.report.success || stats.planted_compared;
        result.report.per_try.push_back(stats);
        for (const auto& c : cands) merger.add(c);
        if (config.stop_on_planted && result.report.success) break;
    }
    result.report.candidates = merger.take();
    return result;
}

Scorer rarity_scorer(const DataModel& model) {
    return [model](const Dataset& ds, std::size_t i0, std::size_t i1) {
        if (ds.layout == Dataset::Layout::dense)
            return rarity_score_dense(ds, model, static_cast<std::uint32_t>(i0),
                                      static_cast<std::uint32_t>(i1));
        const auto& a = ds.x0_features[i0];
        const auto& b = ds.x1_features[i1];
        double s = 0.0;
        std::size_t ia = 0, ib = 0;
        std::vector<bool> in_either(ds.dim, false);
        for (auto f : a) in_either[f] = true;
        for (auto f : b) in_either[f] = true;
        for (std::size_t f = 0; f < ds.dim; ++f)
            if (!in_either[f]) s += std::log(1.0 / model.coords[f].x0_marginal[0]);
        while (ia < a.size() && ib < b.size()) {
            if (a[ia] == b[ib]) {
                s += std::log(1.0 / model.coords[a[ia]].x0_marginal[1]);
                ++ia;
                ++ib;
            } else if (a[ia] < b[ib]) {
                ++ia;
            } else {
                ++ib;
            }
        }
        return s;
    };
}

Scorer agreement_scorer() {
    return [](const Dataset& ds, std::size_t i0, std::size_t i1) {
        if (ds.layout == Dataset::Layout::dense) {
            auto a = ds.x0_point(i0), b = ds.x1_point(i1);
            double s = 0.0;
            for (std::size_t c = 0; c < ds.dim; ++c)
                if (a[c] == b[c]) s += 1.0;
            return s;
        }
        const auto& a = ds.x0_features[i0];
        const auto& b = ds.x1_features[i1];
        std::size_t ia = 0, ib = 0, common = 0;
        while (ia < a.size() && ib < b.size()) {
            if (a[ia] == b[ib]) {
                ++common;
                ++ia;
                ++ib;
            } else if (a[ia] < b[ib]) {
                ++ia;
            } else {
                ++ib;
            }
        }
        // agreements on zeros plus agreements on ones
        return static_cast<double>(ds.dim - (a.size() + b.size() - common) + common);
    };
}

BrutePair brute_force(const Dataset& dataset, const Scorer& scorer) {
    dataset.validate();
    const std::size_t n0 = dataset.n0(), n1 = dataset.n1();
    if (n0 == 0 || n1 == 0) throw std::invalid_argument("brute_force: empty dataset side");
    if (static_cast<double>(n0) * static_cast<double>(n1) > 1e8)
        throw infeasible_error("brute_force: pair count exceeds the 1e8 guard");
    BrutePair best;
    bool first = true;
    for (std::size_t i0 = 0; i0 < n0; ++i0)
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
            const double s = scorer(dataset, i0, i1);
            if (first || s > best.score) {
                best = BrutePair{static_cast<std::uint32_t>(i0), static_cast<std::uint32_t>(i1), s};
                first = false;
            }
        }
    return best;
}

double projection_value(std::span<const std::uint16_t> point, const DataModel& model,
                        const TryPlan& plan) {
    double value = 0.0;
    double prefix_prob = 1.0;
    for (auto c : plan.order) {
        const auto& marg = model.coords[c].x0_marginal;
        double below = 0.0;
        for (std::uint16_t j = 0; j < point[c]; ++j) below += marg[j];
        value += prefix_prob * below;
        prefix_prob *= marg[point[c]];
    }
    return value;
}

void write_report_json(const SearchReport& report, std::ostream& out) {
    nlohmann::json j;
    j["tries_executed"] = report.tries_executed;
    j["total_comparisons"] = report.total_comparisons;
    j["success"] = report.success;
    j["candidates"] = nlohmann::json::array();
    for (const auto& c : report.candidates)
        j["candidates"].push_back({{"x0_index", c.x0_index},
                                   {"x1_index", c.x1_index},
                                   {"score", c.score},
                                   {"first_try_seen", c.first_try_seen}});
    j["per_try"] = nlohmann::json::array();
    for (const auto& s : report.per_try)
        j["per_try"].push_back({{"comparisons", s.comparisons},
                                {"usable_coords", s.usable_coords},
                                {"mean_prefix_len", s.mean_prefix_len},
                                {"max_prefix_len", s.max_prefix_len},
                                {"planted_compared", s.planted_compared}});
    out << j.dump(2) << "\n";
}

void write_candidates_csv(const SearchReport& report, std::ostream& out) {
    out << "x0_index,x1_index,score,first_try_seen\n";
    for (const auto& c : report.candidates)
        out << c.x0_index << "," << c.x1_index << "," << c.score << "," << c.first_try_seen
            << "\n";
}

}  // namespace lexf
