#include "lexforest/oracle.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lexforest/errors.hpp"

namespace lexf {

namespace {

constexpr double kMaxStates = 1e7;
constexpr std::size_t kMaxLeaves = 10'000'000;

void check_leaf(const DataModel& model, const LeafSpec& leaf) {
    if (leaf.w.size() != model.dimension())
        throw std::invalid_argument("leaf: arity does not match the model");
    for (std::size_t i = 0; i < leaf.w.size(); ++i)
        if (leaf.w[i] > model.coords[i].alphabet_size())
            throw std::invalid_argument("leaf: symbol outside alphabet");
}

}  // namespace

double tree_success_probability(const DataModel& model, const BucketingTree& tree) {
    model.validate();
    double s = 0.0;
    for (const auto& leaf : tree) {
        check_leaf(model, leaf);
        double prob = 1.0;
        for (std::size_t i = 0; i < leaf.w.size(); ++i) {
            const auto b = static_cast<std::uint16_t>(model.coords[i].alphabet_size());
            if (leaf.w[i] < b) prob *= model.coords[i].diag_joint[leaf.w[i]];
        }
        s += prob;
    }
    return s;
}

double leaf_occupancy(const DataModel& model, const LeafSpec& leaf, std::int64_t n0) {
    model.validate();
    check_leaf(model, leaf);
    double occ = static_cast<double>(n0);
    for (std::size_t i = 0; i < leaf.w.size(); ++i) {
        const auto b = static_cast<std::uint16_t>(model.coords[i].alphabet_size());
        if (leaf.w[i] < b) occ *= model.coords[i].x0_marginal[leaf.w[i]];
    }
    return occ;
}

double forest_success_probability(const DataModel& model, const BucketingForest& forest) {
    model.validate();
    const std::size_t d = model.dimension();
    for (const auto& tree : forest.trees)
        for (const auto& leaf : tree) check_leaf(model, leaf);

    double states = 1.0;
    for (const auto& c : model.coords) {
        states *= static_cast<double>(c.alphabet_size() + 1);
        if (states > kMaxStates)
            throw infeasible_error("forest success: abbreviated-state space exceeds the 1e7 guard");
    }

    // Per-coordinate distribution of the abbreviated state y_i: the diagonal
    // entries then the disagreement mass at index b_i.
    std::vector<std::vector<double>> py(d);
    for (std::size_t i = 0; i < d; ++i) {
        py[i] = model.coords[i].diag_joint;
        py[i].push_back(model.coords[i].disagreement_mass());
    }

    std::vector<std::uint16_t> y(d, 0);
    double total = 0.0;
    while (true) {
        double prob = 1.0;
        for (std::size_t i = 0; i < d; ++i) prob *= py[i][y[i]];
        if (prob > 0.0) {
            bool hit = false;
            for (const auto& tree : forest.trees) {
                // Leaves of one tree are disjoint: at most one can match y.
                for (const auto& leaf : tree) {
                    bool match = true;
                    for (std::size_t i = 0; i < d; ++i) {
                        const auto b = static_cast<std::uint16_t>(py[i].size() - 1);
                        if (leaf.w[i] != b && leaf.w[i] != y[i]) {
                            match = false;
                            break;
                        }
                    }
                    if (match) {
                        hit = true;
                        break;
                    }
                }
                if (hit) break;
            }
            if (hit) total += prob;
        }
        std::size_t i = 0;
        for (; i < d; ++i) {
            if (++y[i] < py[i].size()) break;
            y[i] = 0;
        }
        if (i == d) break;
    }
    return total;
}

BucketingTree build_capped_tree(const DataModel& model, std::int64_t n0, std::int64_t a,
                                std::span<const std::uint32_t> split_order) {
    model.validate();
    if (n0 < 1 || a < 1) throw std::invalid_argument("capped tree: n0 and a must be positive");
    const std::size_t d = model.dimension();
    if (split_order.size() != d) throw std::invalid_argument("capped tree: order must be a permutation");
    std::vector<bool> seen(d, false);
    for (auto c : split_order) {
        if (c >= d || seen[c]) throw std::invalid_argument("capped tree: order must be a permutation");
        seen[c] = true;
    }

    BucketingTree tree;
    LeafSpec current;
    current.w.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        current.w[i] = static_cast<std::uint16_t>(model.coords[i].alphabet_size());

    auto recurse = [&](auto&& self, std::size_t depth, double occupancy) -> void {
        if (occupancy <= static_cast<double>(a) || depth == d) {
            if (tree.size() >= kMaxLeaves)
                throw infeasible_error("capped tree: leaf count exceeds the guard");
            tree.push_back(current);
            return;
        }
        const std::uint32_t coord = split_order[depth];
        const auto& marg = model.coords[coord].x0_marginal;
        for (std::size_t j = 0; j < marg.size(); ++j) {
            current.w[coord] = static_cast<std::uint16_t>(j);
            self(self, depth + 1, occupancy * marg[j]);
        }
        current.w[coord] = static_cast<std::uint16_t>(marg.size());
    };
    recurse(recurse, 0, static_cast<double>(n0));
    return tree;
}

BucketingForest read_forest(std::istream& in, const DataModel& model, const std::string& origin) {
    model.validate();
    const std::size_t d = model.dimension();
    BucketingForest forest;
    BucketingTree current;
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&] {
        if (!current.empty()) {
            forest.trees.push_back(std::move(current));
            current.clear();
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) {
            flush();
            continue;
        }
        if (line[first] == '#') continue;
        std::istringstream ss(line);
        LeafSpec leaf;
        leaf.w.reserve(d);
        std::string tok;
        while (ss >> tok) {
            if (leaf.w.size() >= d)
                throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                            ": too many symbols on leaf line");
            const std::size_t i = leaf.w.size();
            const int b = model.coords[i].alphabet_size();
            if (tok == "*") {
                leaf.w.push_back(static_cast<std::uint16_t>(b));
            } else {
                long v;
                try {
                    v = std::stol(tok);
                } catch (const std::exception&) {
                    throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                                ": bad symbol '" + tok + "'");
                }
                if (v < 0 || v >= b)
                    throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                                ": value outside alphabet");
                leaf.w.push_back(static_cast<std::uint16_t>(v));
            }
        }
        if (leaf.w.size() != d)
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": leaf line has wrong arity");
        current.push_back(std::move(leaf));
    }
    flush();
    return forest;
}

BucketingForest read_forest(const std::filesystem::path& path, const DataModel& model) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open forest file " + path.string());
    return read_forest(in, model, path.string());
}

void write_forest(const BucketingForest& forest, const DataModel& model, std::ostream& out) {
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        if (t) out << "\n";
        for (const auto& leaf : forest.trees[t]) {
            for (std::size_t i = 0; i < leaf.w.size(); ++i) {
                if (i) out << " ";
                const auto b = static_cast<std::uint16_t>(model.coords[i].alphabet_size());
                if (leaf.w[i] >= b)
                    out << "*";
                else
                    out << leaf.w[i];
            }
            out << "\n";
        }
    }
}

}  // namespace lexf
