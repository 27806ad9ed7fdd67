#include "lexforest/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexforest/engine.hpp"
#include "lexforest/errors.hpp"
#include "lexforest/information.hpp"
#include "lexforest/model.hpp"
#include "lexforest/oracle.hpp"
#include "lexforest/presets.hpp"
#include "lexforest/rng.hpp"

namespace lexf {

namespace {

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {  // lo:hi:step
        double lo, hi, step;
        char c1, c2;
        std::istringstream ss(spec);
        if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw std::invalid_argument("bad grid spec '" + spec + "', expected lo:hi:step");
        for (double x = lo; x <= hi + 1e-12; x += step) out.push_back(x);
        return out;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& spec) {
    std::vector<std::int64_t> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoll(item));
    return out;
}

std::vector<std::string> parse_str_list(const std::string& spec) {
    std::vector<std::string> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot write output file " + path);
    return file;
}

nlohmann::json planner_json(const PlannerResult& p) {
    return {{"lambda", p.lambda},
            {"r", p.r},
            {"epsilon", p.epsilon},
            {"delta", p.delta},
            {"big_n", p.big_n},
            {"ln_tries", p.ln_tries},
            {"tries", std::ceil(std::exp(std::max(0.0, p.ln_tries)))},
            {"e_u", p.e_u},
            {"e_v", p.e_v},
            {"e_w", p.e_w},
            {"var_u", p.var_u},
            {"var_v", p.var_v},
            {"conditions_ok", p.conditions_ok},
            {"degenerate", p.degenerate}};
}

std::vector<PointPair> pairs_from_dataset(const Dataset& ds) {
    if (ds.layout != Dataset::Layout::dense)
        throw std::invalid_argument("training data must be dense");
    if (ds.n0() != ds.n1())
        throw std::invalid_argument("training data needs n0 == n1 aligned pairs");
    std::vector<PointPair> pairs(ds.n0());
    for (std::size_t i = 0; i < ds.n0(); ++i) {
        auto a = ds.x0_point(i), b = ds.x1_point(i);
        pairs[i] = PointPair{{a.begin(), a.end()}, {b.begin(), b.end()}};
    }
    return pairs;
}

struct BenchRow {
    std::int64_t n0, n1;
    std::string algo;
    std::int64_t rep;
    std::uint64_t seed;
    bool success;
    std::int64_t tries;
    std::int64_t comparisons;
    double wall_ms;
};

int cmd_bench(const std::string& model_spec, const std::string& n0_grid,
              const std::string& n1_grid, const std::string& algos_list, std::int64_t reps,
              std::uint64_t seed, std::int64_t tries, std::int64_t window, double p,
              std::int64_t k, const std::string& out_path) {
    const auto n0s = parse_int_list(n0_grid);
    const auto algos = parse_str_list(algos_list);
    if (n0s.empty() || algos.empty() || reps < 1)
        throw std::invalid_argument("bench: grids must be nonempty and reps >= 1");
    const auto n1s = n1_grid.empty() ? n0s : parse_int_list(n1_grid);
    if (n1s.size() != n0s.size())
        throw std::invalid_argument("bench: n1 grid must match the n0 grid");

    std::vector<BenchRow> rows;
    for (std::size_t g = 0; g < n0s.size(); ++g) {
        DataModel model = model_from_spec(model_spec, n0s[g], n1s[g]);
        for (const auto& algo : algos) {
            for (std::int64_t rep = 0; rep < reps; ++rep) {
                const std::uint64_t inst_seed =
                    mix64(seed, static_cast<std::uint64_t>(n0s[g]), static_cast<std::uint64_t>(rep));
                Dataset ds = generate_instance(model, inst_seed);
                SearchConfig cfg;
                cfg.window = window;
                cfg.tries = tries;
                cfg.master_seed = mix64(inst_seed, 0x5eedULL);
                cfg.stop_on_planted = true;
                cfg.compute_scores = false;
                cfg.collect_candidates = false;
                const auto t0 = std::chrono::steady_clock::now();
                SearchReport rep_out;
                if (algo == "forest") {
                    rep_out = search(ds, model, cfg);
                } else if (algo == "sparse") {
                    rep_out = sparse_search(to_sparse(ds), model, cfg);
                } else if (algo == "classic") {
                    if (tries < 0) throw std::invalid_argument("bench: classic needs --tries");
                    rep_out = classic_search(ds, p, k, cfg);
                } else {
                    throw std::invalid_argument("bench: unknown algorithm '" + algo + "'");
                }
                const auto t1 = std::chrono::steady_clock::now();
                rows.push_back(BenchRow{
                    n0s[g], n1s[g], algo, rep, inst_seed, rep_out.success,
                    rep_out.success ? rep_out.tries_executed : -1, rep_out.total_comparisons,
                    std::chrono::duration<double, std::milli>(t1 - t0).count()});
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.n0, a.algo, a.rep) < std::tie(b.n0, b.algo, b.rep);
    });
    std::ofstream file;
    auto& out = open_out(file, out_path);
    out << "n0,n1,algorithm,replication,seed,success,tries_to_success,comparisons,wall_ms\n";
    for (const auto& r : rows)
        out << r.n0 << "," << r.n1 << "," << r.algo << "," << r.rep << "," << r.seed << ","
            << (r.success ? 1 : 0) << "," << r.tries << "," << r.comparisons << "," << r.wall_ms
            << "\n";
    return 0;
}

int run_app(const std::vector<std::string>& args) {
    CLI::App app{"Random-exponent lexicographic forest search and its performance theory"};
    app.require_subcommand(1);

    // --- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a planted-pair instance");
    std::string gen_model, gen_out;
    std::int64_t gen_n0 = 1024, gen_n1 = 1024;
    std::uint64_t gen_seed = 0;
    bool gen_sparse = false;
    gen->add_option("--model", gen_model, "Model file or preset")->required();
    gen->add_option("--n0", gen_n0);
    gen->add_option("--n1", gen_n1);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out, "Output dataset file")->required();
    gen->add_flag("--sparse", gen_sparse, "Write the sparse layout (binary models)");

    // --- info --------------------------------------------------------------
    auto* info = app.add_subcommand("info", "Bucketing forest information per coordinate");
    std::string info_model, info_grid = "0:3:0.25", info_out;
    info->add_option("--model", info_model)->required();
    info->add_option("--lambdas", info_grid, "Comma list or lo:hi:step grid");
    info->add_option("--out", info_out);

    // --- cutoff ------------------------------------------------------------
    auto* cutoff = app.add_subcommand("cutoff", "Cutoff exponent and predicted ln tries");
    std::string cut_model;
    std::int64_t cut_n0 = 0;
    cutoff->add_option("--model", cut_model)->required();
    cutoff->add_option("--n0", cut_n0)->required();

    // --- plan --------------------------------------------------------------
    auto* plan = app.add_subcommand("plan", "Try-budget planner");
    std::string plan_model;
    std::int64_t plan_n0 = 0, plan_window = 4;
    double plan_eps = 0.1, plan_delta = 1.0 / 14.0;
    plan->add_option("--model", plan_model)->required();
    plan->add_option("--n0", plan_n0)->required();
    plan->add_option("--window", plan_window);
    plan->add_option("--epsilon", plan_eps);
    plan->add_option("--delta", plan_delta);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run a search on a dataset");
    std::string run_data, run_model, run_algo = "forest", run_out, run_cands, run_train;
    std::int64_t run_tries = -1, run_window = 4, run_k = 10;
    std::uint64_t run_seed = 0;
    double run_p = 0.9;
    bool run_stop = false, run_swap = false, run_exact_sparse = false;
    std::optional<double> run_eps, run_delta;
    run->add_option("--data", run_data)->required();
    run->add_option("--model", run_model)->required();
    run->add_option("--algo", run_algo)->check(CLI::IsMember({"forest", "sparse", "classic", "greedy", "brute"}));
    run->add_option("--tries", run_tries, "Try budget (-1 = auto)");
    run->add_option("--window", run_window);
    run->add_option("--seed", run_seed);
    run->add_option("--p", run_p, "classic: agreement probability");
    run->add_option("--k", run_k, "classic: coordinates per try");
    run->add_option("--train", run_train, "greedy: aligned training dataset");
    run->add_option("--epsilon", run_eps, "auto budget via the planner");
    run->add_option("--delta", run_delta);
    run->add_flag("--stop-on-planted", run_stop);
    run->add_flag("--swap-sides", run_swap);
    run->add_flag("--exact-sparse", run_exact_sparse, "sparse: solve exponents exactly");
    run->add_option("--out", run_out, "Report JSON path");
    run->add_option("--candidates", run_cands, "Candidates CSV path");

    // --- bench -------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "Replicated sweeps, long-form CSV");
    std::string bench_model, bench_n0, bench_n1, bench_algos = "forest", bench_out;
    std::int64_t bench_reps = 1, bench_tries = -1, bench_window = 4, bench_k = 10;
    std::uint64_t bench_seed = 0;
    double bench_p = 0.9;
    bench->add_option("--model", bench_model)->required();
    bench->add_option("--n0-grid", bench_n0, "Comma list of n0 values")->required();
    bench->add_option("--n1-grid", bench_n1, "Defaults to the n0 grid");
    bench->add_option("--algos", bench_algos, "Comma list: forest,sparse,classic");
    bench->add_option("--reps", bench_reps);
    bench->add_option("--seed", bench_seed);
    bench->add_option("--tries", bench_tries);
    bench->add_option("--window", bench_window);
    bench->add_option("--p", bench_p);
    bench->add_option("--k", bench_k);
    bench->add_option("--out", bench_out);

    // --- oracle ------------------------------------------------------------
    auto* oracle = app.add_subcommand("oracle", "Exact forest success probability");
    std::string or_model, or_forest, or_lambdas;
    std::int64_t or_n0 = 0, or_window = 4;
    oracle->add_option("--model", or_model)->required();
    oracle->add_option("--forest", or_forest)->required();
    oracle->add_option("--bounds", or_lambdas, "Lambda grid for the bound table");
    oracle->add_option("--n0", or_n0, "Needed for the bound table");
    oracle->add_option("--window", or_window);

    // --- dimred ------------------------------------------------------------
    auto* dimred = app.add_subcommand("dimred", "Dimensionality-reduction comparison");
    double dr_p01 = 0.0, dr_p11 = 0.0, dr_p1s = 0.0, dr_n = 1e6;
    dimred->add_option("--p01", dr_p01)->required();
    dimred->add_option("--p11", dr_p11)->required();
    dimred->add_option("--p1star", dr_p1s)->required();
    dimred->add_option("--n", dr_n);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    if (gen->parsed()) {
        DataModel model = model_from_spec(gen_model, gen_n0, gen_n1);
        Dataset ds = generate_instance(model, gen_seed);
        if (gen_sparse) ds = to_sparse(ds);
        write_dataset(ds, std::filesystem::path(gen_out));
        return 0;
    }
    if (info->parsed()) {
        DataModel model = model_from_spec(info_model);
        std::ofstream file;
        auto& out = open_out(file, info_out);
        out << "lambda,coordinate,f,v\n";
        for (double lam : parse_grid(info_grid)) {
            double fsum = 0.0, vsum = 0.0;
            for (std::size_t i = 0; i < model.dimension(); ++i) {
                const auto fi = forest_information(model.coords[i], lam);
                const double vi = variance_v(model.coords[i], lam);
                fsum += fi.f_value;
                vsum += vi;
                out << lam << "," << i << "," << fi.f_value << "," << vi << "\n";
            }
            out << lam << ",total," << fsum << "," << vsum << "\n";
        }
        return 0;
    }
    if (cutoff->parsed()) {
        DataModel model = model_from_spec(cut_model);
        const auto res = cutoff_exponent(model, cut_n0);
        nlohmann::json j{{"lambda_cut", res.lambda_cut},
                         {"ln_tries", res.ln_tries},
                         {"tries", std::ceil(std::exp(std::max(0.0, res.ln_tries)))}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (plan->parsed()) {
        DataModel model = model_from_spec(plan_model);
        const auto res = plan_tries(model, plan_n0, plan_window, plan_eps, plan_delta);
        std::cout << planner_json(res).dump(2) << "\n";
        return 0;
    }
    if (run->parsed()) {
        DataModel model = model_from_spec(run_model);
        Dataset ds = read_dataset(std::filesystem::path(run_data));
        SearchConfig cfg;
        cfg.window = run_window;
        cfg.tries = run_tries;
        cfg.master_seed = run_seed;
        cfg.stop_on_planted = run_stop;
        cfg.swap_sides = run_swap;
        cfg.sparse_exact = run_exact_sparse;
        cfg.epsilon = run_eps;
        cfg.delta = run_delta;

        SearchReport report;
        if (run_algo == "forest") {
            report = search(ds, model, cfg);
        } else if (run_algo == "sparse") {
            report = sparse_search(ds.layout == Dataset::Layout::sparse ? ds : to_sparse(ds),
                                   model, cfg);
        } else if (run_algo == "classic") {
            if (cfg.tries < 0) cfg.tries = 1;
            report = classic_search(ds, run_p, run_k, cfg);
        } else if (run_algo == "greedy") {
            if (run_train.empty()) throw std::invalid_argument("greedy needs --train");
            Dataset train = read_dataset(std::filesystem::path(run_train));
            report = greedy_trained_search(pairs_from_dataset(train), ds, cfg).report;
        } else {  // brute
            const auto best = brute_force(ds, rarity_scorer(model));
            nlohmann::json j{{"x0_index", best.x0_index},
                             {"x1_index", best.x1_index},
                             {"score", best.score}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (!run_out.empty()) {
            std::ofstream f(run_out);
            if (!f) throw std::invalid_argument("cannot write " + run_out);
            write_report_json(report, f);
        } else {
            write_report_json(report, std::cout);
        }
        if (!run_cands.empty()) {
            std::ofstream f(run_cands);
            if (!f) throw std::invalid_argument("cannot write " + run_cands);
            write_candidates_csv(report, f);
        }
        return 0;
    }
    if (bench->parsed()) {
        return cmd_bench(bench_model, bench_n0, bench_n1, bench_algos, bench_reps, bench_seed,
                         bench_tries, bench_window, bench_p, bench_k, bench_out);
    }
    if (oracle->parsed()) {
        DataModel model = model_from_spec(or_model);
        BucketingForest forest = read_forest(std::filesystem::path(or_forest), model);
        const double s = forest_success_probability(model, forest);
        nlohmann::json j{{"success", s}, {"trees", forest.trees.size()}};
        double tree_sum = 0.0;
        for (const auto& t : forest.trees) tree_sum += tree_success_probability(model, t);
        j["tree_success_sum"] = tree_sum;
        std::cout << j.dump(2) << "\n";
        if (!or_lambdas.empty()) {
            if (or_n0 < 1) throw std::invalid_argument("oracle: bound table needs --n0");
            std::cout << "lambda,tree_bound,semilex_bound\n";
            const double big_n =
                std::max(1.0, 2.0 * static_cast<double>(or_n0) / static_cast<double>(or_window));
            for (double lam : parse_grid(or_lambdas)) {
                const double tb = tree_success_bound(model, lam, big_n);
                const double sb =
                    lam <= 1.0 ? semilex_success_bound(model, lam, or_n0, or_window) : -1.0;
                std::cout << lam << "," << tb << "," << sb << "\n";
            }
        }
        return 0;
    }
    if (dimred->parsed()) {
        const auto res = dimred_comparison(dr_p01, dr_p11, dr_p1s, dr_n);
        nlohmann::json j{{"c", res.c},
                         {"ideal_dimred_exp", res.ideal_dimred_exp},
                         {"im_exp", res.im_exp},
                         {"direct_exp_exact", res.direct_exp_exact},
                         {"direct_exp_approx", res.direct_exp_approx},
                         {"n", res.n},
                         {"ideal_dimred_tries", std::pow(res.n, res.ideal_dimred_exp)},
                         {"im_tries", std::pow(res.n, res.im_exp)},
                         {"direct_tries", std::pow(res.n, res.direct_exp_exact)}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    return 2;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    try {
        return run_app(args);
    } catch (const insufficient_information& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace lexf
