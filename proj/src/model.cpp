#include "lexforest/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lexforest/errors.hpp"
#include "lexforest/rng.hpp"

namespace lexf {

namespace {

constexpr double kProbTol = 1e-12;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

[[noreturn]] void fail_at(const std::string& origin, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << what;
    throw std::invalid_argument(os.str());
}

// Stream tags for per-point randomness; each point gets its own counter
// stream so generation is a pure function of (seed, side, index).
enum : std::uint64_t { kMetaStream = 0, kX0Stream = 1, kX1Stream = 2, kPlantedStream = 3 };

std::uint16_t sample_from(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
        acc += probs[j];
        if (u < acc) return static_cast<std::uint16_t>(j);
    }
    return static_cast<std::uint16_t>(probs.size() - 1);
}

}  // namespace

double CoordinateDistribution::agreement_mass() const {
    double s = 0.0;
    for (double p : diag_joint) s += p;
    return s;
}

void CoordinateDistribution::validate() const {
    const std::size_t b = x0_marginal.size();
    if (b < 2) fail("coordinate: alphabet size must be at least 2");
    if (diag_joint.size() != b) fail("coordinate: diag/marginal size mismatch");
    double marg_sum = 0.0, diag_sum = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
        const double pj = diag_joint[j], mj = x0_marginal[j];
        if (!(mj >= 0.0) || !(mj <= 1.0)) fail("coordinate: marginal out of [0,1]");
        if (!(pj >= 0.0)) fail("coordinate: negative diagonal probability");
        if (pj > mj + kProbTol) fail("coordinate: p_j exceeds p_{j*}");
        if (pj > 0.0 && mj <= 0.0) fail("coordinate: positive diagonal on zero marginal");
        marg_sum += mj;
        diag_sum += pj;
    }
    if (std::abs(marg_sum - 1.0) > kProbTol) fail("coordinate: x0 marginal must sum to 1");
    if (diag_sum > 1.0 + kProbTol) fail("coordinate: diagonal mass exceeds 1");
    if (x1_marginal) {
        if (x1_marginal->size() != b) fail("coordinate: x1 marginal size mismatch");
        double s = 0.0;
        for (std::size_t j = 0; j < b; ++j) {
            const double mj = (*x1_marginal)[j];
            if (!(mj >= 0.0) || !(mj <= 1.0)) fail("coordinate: x1 marginal out of [0,1]");
            if (diag_joint[j] > mj + kProbTol) fail("coordinate: p_j exceeds p_{*j}");
            s += mj;
        }
        if (std::abs(s - 1.0) > kProbTol) fail("coordinate: x1 marginal must sum to 1");
    }
}

bool DataModel::homogeneous() const {
    for (std::size_t i = 1; i < coords.size(); ++i)
        if (!(coords[i] == coords[0])) return false;
    return true;
}

void DataModel::validate() const {
    if (coords.empty()) fail("model: needs at least one coordinate");
    for (const auto& c : coords) c.validate();
    if (n0 < 1 || n1 < 1) fail("model: set sizes must be positive");
}

void Dataset::validate() const {
    if (layout == Layout::dense) {
        if (dim == 0) fail("dataset: dense layout needs a positive dimension");
        if (alphabet.size() != dim) fail("dataset: alphabet size mismatch");
        if (x0_values.size() % dim || x1_values.size() % dim)
            fail("dataset: ragged dense rows");
        auto check = [&](const std::vector<std::uint16_t>& vals) {
            for (std::size_t k = 0; k < vals.size(); ++k)
                if (vals[k] >= alphabet[k % dim]) fail("dataset: value outside alphabet");
        };
        check(x0_values);
        check(x1_values);
    } else {
        for (const auto* side : {&x0_features, &x1_features})
            for (const auto& fs : *side)
                for (std::size_t k = 0; k < fs.size(); ++k) {
                    if (fs[k] >= dim) fail("dataset: feature id outside dimension");
                    if (k && fs[k] <= fs[k - 1]) fail("dataset: features must be sorted unique");
                }
    }
    if (planted) {
        if (planted->x0_index >= n0() || planted->x1_index >= n1())
            fail("dataset: planted indices out of range");
    }
}

Dataset generate_instance(const DataModel& model, std::uint64_t seed, bool strict) {
    model.validate();
    const std::size_t d = model.dimension();

    std::vector<const std::vector<double>*> x1_marg(d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto& c = model.coords[i];
        if (c.x1_marginal) {
            x1_marg[i] = &*c.x1_marginal;
        } else if (strict) {
            fail("generate_instance: x1 marginal missing in strict mode");
        } else {
            x1_marg[i] = &c.x0_marginal;
        }
    }

    Dataset ds;
    ds.layout = Dataset::Layout::dense;
    ds.dim = d;
    ds.alphabet.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        ds.alphabet[i] = static_cast<std::uint32_t>(model.coords[i].alphabet_size());

    const auto n0 = static_cast<std::size_t>(model.n0);
    const auto n1 = static_cast<std::size_t>(model.n1);

    SplitMix64 meta(mix64(seed, kMetaStream, 0));
    const auto i0 = static_cast<std::uint32_t>(meta.next_below(n0));
    const auto i1 = static_cast<std::uint32_t>(meta.next_below(n1));
    ds.planted = PlantedPair{i0, i1};

    ds.x0_values.resize(n0 * d);
    for (std::size_t p = 0; p < n0; ++p) {
        SplitMix64 rng(mix64(seed, kX0Stream, p));
        auto* row = ds.x0_values.data() + p * d;
        for (std::size_t i = 0; i < d; ++i)
            row[i] = sample_from(model.coords[i].x0_marginal, rng.next_u01());
    }

    ds.x1_values.resize(n1 * d);
    for (std::size_t q = 0; q < n1; ++q) {
        if (q == i1) continue;
        SplitMix64 rng(mix64(seed, kX1Stream, q));
        auto* row = ds.x1_values.data() + q * d;
        for (std::size_t i = 0; i < d; ++i)
            row[i] = sample_from(*x1_marg[i], rng.next_u01());
    }

    // Planted X1 point: copy the partner's value with probability p_j/p_{j*},
    // otherwise redraw from the x1 marginal restricted to other values.
    {
        SplitMix64 rng(mix64(seed, kPlantedStream, 0));
        const auto* src = ds.x0_values.data() + static_cast<std::size_t>(i0) * d;
        auto* row = ds.x1_values.data() + static_cast<std::size_t>(i1) * d;
        for (std::size_t i = 0; i < d; ++i) {
            const auto& c = model.coords[i];
            const std::uint16_t j = src[i];
            const double pj = c.diag_joint[j];
            const double mj = c.x0_marginal[j];
            if (rng.next_u01() < (mj > 0.0 ? pj / mj : 0.0)) {
                row[i] = j;
                continue;
            }
            const auto& marg = *x1_marg[i];
            const double rest = 1.0 - marg[j];
            if (rest <= 0.0)
                fail("generate_instance: disagreement required but x1 marginal has no mass off the shared value");
            double u = rng.next_u01() * rest;
            double acc = 0.0;
            std::uint16_t pick = 0;
            bool found = false;
            for (std::size_t v = 0; v < marg.size(); ++v) {
                if (v == j) continue;
                acc += marg[v];
                pick = static_cast<std::uint16_t>(v);
                if (u < acc) {
                    found = true;
                    break;
                }
            }
            (void)found;
            row[i] = pick;
        }
    }
    return ds;
}

DataModel estimate_model(const std::vector<PointPair>& pairs, double smoothing) {
    if (pairs.empty()) fail("estimate_model: no pairs");
    if (smoothing < 0.0) fail("estimate_model: smoothing must be nonnegative");
    const std::size_t d = pairs.front().x0.size();
    if (d == 0 || pairs.front().x1.size() != d) fail("estimate_model: dimension mismatch");
    for (const auto& pr : pairs)
        if (pr.x0.size() != d || pr.x1.size() != d) fail("estimate_model: dimension mismatch");

    const double n = static_cast<double>(pairs.size());
    DataModel model;
    model.coords.resize(d);
    model.n0 = model.n1 = static_cast<std::int64_t>(pairs.size());

    for (std::size_t i = 0; i < d; ++i) {
        std::uint16_t maxv = 1;
        for (const auto& pr : pairs) maxv = std::max({maxv, pr.x0[i], pr.x1[i]});
        const std::size_t b = static_cast<std::size_t>(maxv) + 1;

        std::vector<double> cnt0(b, 0.0), cnt_both(b, 0.0);
        for (const auto& pr : pairs) {
            cnt0[pr.x0[i]] += 1.0;
            if (pr.x0[i] == pr.x1[i]) cnt_both[pr.x0[i]] += 1.0;
        }

        auto& c = model.coords[i];
        c.x0_marginal.resize(b);
        c.diag_joint.resize(b);
        const double denom_m = n + static_cast<double>(b) * smoothing;
        for (std::size_t j = 0; j < b; ++j)
            c.x0_marginal[j] = (cnt0[j] + smoothing) / denom_m;
        for (std::size_t j = 0; j < b; ++j) {
            double pj = (cnt_both[j] + smoothing * c.x0_marginal[j]) / (n + smoothing);
            c.diag_joint[j] = std::min(pj, c.x0_marginal[j]);
        }
        c.validate();
    }
    return model;
}

Dataset to_sparse(const Dataset& dense) {
    if (dense.layout != Dataset::Layout::dense) return dense;
    for (auto b : dense.alphabet)
        if (b != 2) fail("to_sparse: every coordinate must be binary");
    Dataset s;
    s.layout = Dataset::Layout::sparse;
    s.dim = dense.dim;
    s.planted = dense.planted;
    auto convert = [&](const std::vector<std::uint16_t>& vals,
                       std::vector<std::vector<std::uint32_t>>& out) {
        const std::size_t n = vals.size() / dense.dim;
        out.resize(n);
        for (std::size_t p = 0; p < n; ++p) {
            const auto* row = vals.data() + p * dense.dim;
            for (std::size_t i = 0; i < dense.dim; ++i)
                if (row[i]) out[p].push_back(static_cast<std::uint32_t>(i));
        }
    };
    convert(dense.x0_values, s.x0_features);
    convert(dense.x1_values, s.x1_features);
    return s;
}

Dataset to_dense(const Dataset& sparse, std::size_t dim) {
    if (sparse.layout != Dataset::Layout::sparse) return sparse;
    Dataset d;
    d.layout = Dataset::Layout::dense;
    d.dim = dim ? dim : sparse.dim;
    d.alphabet.assign(d.dim, 2);
    d.planted = sparse.planted;
    auto convert = [&](const std::vector<std::vector<std::uint32_t>>& feats,
                       std::vector<std::uint16_t>& out) {
        out.assign(feats.size() * d.dim, 0);
        for (std::size_t p = 0; p < feats.size(); ++p)
            for (auto f : feats[p]) {
                if (f >= d.dim) fail("to_dense: feature id outside dimension");
                out[p * d.dim + f] = 1;
            }
    };
    convert(sparse.x0_features, d.x0_values);
    convert(sparse.x1_features, d.x1_values);
    return d;
}

// ---------------------------------------------------------------------------
// File formats. Dense: "#dense d=<d> b=<b0,...>", one point per line, a "#x1"
// directive between the X0 and X1 blocks, optional "#planted <i0> <i1>"
// trailer. Sparse: "#sparse d=<d>" with feature-id lines.
// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint32_t> parse_alphabets(const std::string& list, std::size_t d,
                                           const std::string& origin, std::size_t line_no) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
        } catch (const std::exception&) {
            fail_at(origin, line_no, "bad alphabet entry '" + item + "'");
        }
    }
    if (out.size() == 1 && d > 1) out.assign(d, out[0]);
    if (out.size() != d) fail_at(origin, line_no, "alphabet list does not match d");
    for (auto b : out)
        if (b < 2 || b > 65535) fail_at(origin, line_no, "alphabet size out of range");
    return out;
}

}  // namespace

Dataset read_dataset(std::istream& in, const std::string& origin) {
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    bool in_x1 = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!have_header) {
            std::istringstream hs(line);
            std::string tag;
            hs >> tag;
            std::size_t d = 0;
            std::string b_list;
            std::string tok;
            while (hs >> tok) {
                if (tok.rfind("d=", 0) == 0)
                    d = std::stoul(tok.substr(2));
                else if (tok.rfind("b=", 0) == 0)
                    b_list = tok.substr(2);
                else
                    fail_at(origin, line_no, "unknown header token '" + tok + "'");
            }
            if (tag == "#dense") {
                ds.layout = Dataset::Layout::dense;
                if (d == 0) fail_at(origin, line_no, "dense header needs d=");
                ds.dim = d;
                ds.alphabet = parse_alphabets(b_list, d, origin, line_no);
            } else if (tag == "#sparse") {
                ds.layout = Dataset::Layout::sparse;
                if (d == 0) fail_at(origin, line_no, "sparse header needs d=");
                ds.dim = d;
            } else {
                fail_at(origin, line_no, "expected #dense or #sparse header");
            }
            have_header = true;
            continue;
        }
        if (line.rfind("#x1", 0) == 0) {
            if (in_x1) fail_at(origin, line_no, "duplicate #x1 directive");
            in_x1 = true;
            continue;
        }
        if (line.rfind("#planted", 0) == 0) {
            std::istringstream ps(line.substr(8));
            std::uint32_t a = 0, b = 0;
            if (!(ps >> a >> b)) fail_at(origin, line_no, "bad #planted trailer");
            ds.planted = PlantedPair{a, b};
            continue;
        }
        if (!line.empty() && line[0] == '#') continue;  // comment

        if (ds.layout == Dataset::Layout::dense) {
            auto& vals = in_x1 ? ds.x1_values : ds.x0_values;
            std::istringstream ls(line);
            std::size_t count = 0;
            long v;
            while (ls >> v) {
                if (count >= ds.dim) fail_at(origin, line_no, "too many values on point line");
                if (v < 0 || static_cast<std::uint32_t>(v) >= ds.alphabet[count])
                    fail_at(origin, line_no,
                            "value " + std::to_string(v) + " outside alphabet of coordinate " +
                                std::to_string(count));
                vals.push_back(static_cast<std::uint16_t>(v));
                ++count;
            }
            if (!ls.eof()) fail_at(origin, line_no, "malformed value");
            if (count != ds.dim) fail_at(origin, line_no, "point line has wrong arity");
        } else {
            auto& side = in_x1 ? ds.x1_features : ds.x0_features;
            std::vector<std::uint32_t> feats;
            std::istringstream ls(line);
            long f;
            while (ls >> f) {
                if (f < 0 || static_cast<std::size_t>(f) >= ds.dim)
                    fail_at(origin, line_no, "feature id " + std::to_string(f) + " out of range");
                feats.push_back(static_cast<std::uint32_t>(f));
            }
            if (!ls.eof()) fail_at(origin, line_no, "malformed feature id");
            std::sort(feats.begin(), feats.end());
            if (std::adjacent_find(feats.begin(), feats.end()) != feats.end())
                fail_at(origin, line_no, "duplicate feature id");
            side.push_back(std::move(feats));
        }
    }
    if (!have_header) fail_at(origin, line_no, "empty dataset file");
    ds.validate();
    return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open dataset file " + path.string());
    return read_dataset(in, path.string());
}

void write_dataset(const Dataset& ds, std::ostream& out) {
    if (ds.layout == Dataset::Layout::dense) {
        out << "#dense d=" << ds.dim << " b=";
        for (std::size_t i = 0; i < ds.alphabet.size(); ++i)
            out << (i ? "," : "") << ds.alphabet[i];
        out << "\n";
        auto dump = [&](const std::vector<std::uint16_t>& vals) {
            const std::size_t n = ds.dim ? vals.size() / ds.dim : 0;
            for (std::size_t p = 0; p < n; ++p) {
                const auto* row = vals.data() + p * ds.dim;
                for (std::size_t i = 0; i < ds.dim; ++i) out << (i ? " " : "") << row[i];
                out << "\n";
            }
        };
        dump(ds.x0_values);
        out << "#x1\n";
        dump(ds.x1_values);
    } else {
        out << "#sparse d=" << ds.dim << "\n";
        auto dump = [&](const std::vector<std::vector<std::uint32_t>>& side) {
            for (const auto& fs : side) {
                for (std::size_t i = 0; i < fs.size(); ++i) out << (i ? " " : "") << fs[i];
                out << "\n";
            }
        };
        dump(ds.x0_features);
        out << "#x1\n";
        dump(ds.x1_features);
    }
    if (ds.planted)
        out << "#planted " << ds.planted->x0_index << " " << ds.planted->x1_index << "\n";
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write dataset file " + path.string());
    write_dataset(ds, out);
}

namespace {

std::vector<double> parse_probs(std::istringstream& ss, std::size_t b, const std::string& origin,
                                std::size_t line_no) {
    std::vector<double> out;
    out.reserve(b);
    for (std::size_t j = 0; j < b; ++j) {
        double v;
        if (!(ss >> v)) fail_at(origin, line_no, "expected " + std::to_string(b) + " probabilities");
        out.push_back(v);
    }
    return out;
}

void expect_separator(std::istringstream& ss, const std::string& origin, std::size_t line_no) {
    std::string tok;
    if (!(ss >> tok) || tok != "|") fail_at(origin, line_no, "expected '|' separator");
}

}  // namespace

DataModel read_model(std::istream& in, const std::string& origin) {
    DataModel model;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::size_t b = 0;
        if (!(ss >> b) || b < 2) fail_at(origin, line_no, "coordinate line must start with b >= 2");
        CoordinateDistribution c;
        c.diag_joint = parse_probs(ss, b, origin, line_no);
        expect_separator(ss, origin, line_no);
        c.x0_marginal = parse_probs(ss, b, origin, line_no);
        std::string tok;
        if (ss >> tok) {
            if (tok != "|") fail_at(origin, line_no, "unexpected trailing token '" + tok + "'");
            c.x1_marginal = parse_probs(ss, b, origin, line_no);
            if (ss >> tok) fail_at(origin, line_no, "unexpected trailing token '" + tok + "'");
        }
        // Hand-written marginals tolerate small rounding; renormalize before
        // the strict validity check.
        auto renorm = [&](std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            if (std::abs(s - 1.0) > 1e-6)
                fail_at(origin, line_no, "marginal probabilities must sum to 1");
            if (std::abs(s - 1.0) > kProbTol)
                for (double& x : v) x /= s;
        };
        renorm(c.x0_marginal);
        if (c.x1_marginal) renorm(*c.x1_marginal);
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            fail_at(origin, line_no, e.what());
        }
        model.coords.push_back(std::move(c));
    }
    if (model.coords.empty()) fail("model file " + origin + " has no coordinates");
    return model;
}

DataModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open model file " + path.string());
    return read_model(in, path.string());
}

void write_model(const DataModel& model, std::ostream& out) {
    out << std::setprecision(17);
    for (const auto& c : model.coords) {
        out << c.alphabet_size();
        for (double p : c.diag_joint) out << " " << p;
        out << " |";
        for (double p : c.x0_marginal) out << " " << p;
        if (c.x1_marginal) {
            out << " |";
            for (double p : *c.x1_marginal) out << " " << p;
        }
        out << "\n";
    }
}

void write_model(const DataModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write model file " + path.string());
    write_model(model, out);
}

}  // namespace lexf
