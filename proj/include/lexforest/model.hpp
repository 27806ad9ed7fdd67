#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lexf {

/// Per-coordinate statistics of the independent data model: the diagonal
/// joint probabilities p_j (both special points take value j), the X0
/// marginal p_{j*}, and optionally the X1 marginal p_{*j} used only when
/// synthesizing instances. The disagreement mass p_b = 1 - sum_j p_j.
struct CoordinateDistribution {
    std::vector<double> diag_joint;                 // p_j, size b
    std::vector<double> x0_marginal;                // p_{j*}, size b
    std::optional<std::vector<double>> x1_marginal; // p_{*j}, size b

    int alphabet_size() const { return static_cast<int>(x0_marginal.size()); }
    double agreement_mass() const;                  // sum_j p_j
    double disagreement_mass() const { return 1.0 - agreement_mass(); }

    /// Throws std::invalid_argument on any violated invariant. Marginals may
    /// be zero only where the matching diagonal entry is zero.
    void validate() const;

    bool operator==(const CoordinateDistribution&) const = default;
};

struct DataModel {
    std::vector<CoordinateDistribution> coords;
    std::int64_t n0 = 1;
    std::int64_t n1 = 1;

    std::size_t dimension() const { return coords.size(); }
    /// True when all coordinates share one distribution.
    bool homogeneous() const;
    void validate() const;
};

struct PlantedPair {
    std::uint32_t x0_index = 0;
    std::uint32_t x1_index = 0;
    bool operator==(const PlantedPair&) const = default;
};

/// Point store. Dense points are flat rows of d values; the sparse form keeps
/// sorted feature-id sets and is only valid when every coordinate is binary.
struct Dataset {
    enum class Layout { dense, sparse };

    Layout layout = Layout::dense;
    std::size_t dim = 0;
    std::vector<std::uint32_t> alphabet;  // per-coordinate b (dense layout)

    std::vector<std::uint16_t> x0_values;  // dense, n0 rows of dim
    std::vector<std::uint16_t> x1_values;
    std::vector<std::vector<std::uint32_t>> x0_features;  // sparse
    std::vector<std::vector<std::uint32_t>> x1_features;

    std::optional<PlantedPair> planted;

    std::size_t n0() const {
        return layout == Layout::dense ? x0_values.size() / (dim ? dim : 1) : x0_features.size();
    }
    std::size_t n1() const {
        return layout == Layout::dense ? x1_values.size() / (dim ? dim : 1) : x1_features.size();
    }
    std::span<const std::uint16_t> x0_point(std::size_t i) const {
        return {x0_values.data() + i * dim, dim};
    }
    std::span<const std::uint16_t> x1_point(std::size_t i) const {
        return {x1_values.data() + i * dim, dim};
    }

    void validate() const;
    bool operator==(const Dataset&) const = default;
};

/// One aligned training observation: an X0 point and its paired X1 point.
struct PointPair {
    std::vector<std::uint16_t> x0;
    std::vector<std::uint16_t> x1;
};

/// Synthesize a planted-pair instance. Pure function of (model, seed):
/// every point's randomness is derived from an independent counter-based
/// stream keyed by (seed, side, point index). When a coordinate lacks
/// x1_marginal it defaults to x0_marginal unless strict is set.
Dataset generate_instance(const DataModel& model, std::uint64_t seed, bool strict = false);

/// Empirical model from aligned pairs. Marginals use add-smoothing spread
/// over the alphabet; the diagonal uses a marginal-proportional prior and is
/// clamped to keep p_j <= p_{j*}.
DataModel estimate_model(const std::vector<PointPair>& pairs, double smoothing);

/// Binary-alphabet conversions between the two layouts.
Dataset to_sparse(const Dataset& dense);
Dataset to_dense(const Dataset& sparse, std::size_t dim);

Dataset read_dataset(const std::filesystem::path& path);
Dataset read_dataset(std::istream& in, const std::string& origin = "<stream>");
void write_dataset(const Dataset& ds, const std::filesystem::path& path);
void write_dataset(const Dataset& ds, std::ostream& out);

DataModel read_model(const std::filesystem::path& path);
DataModel read_model(std::istream& in, const std::string& origin = "<stream>");
void write_model(const DataModel& model, const std::filesystem::path& path);
void write_model(const DataModel& model, std::ostream& out);

}  // namespace lexf
