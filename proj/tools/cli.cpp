#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "muss/bench.hpp"
#include "muss/clustering.hpp"
#include "muss/error.hpp"
#include "muss/greedy.hpp"
#include "muss/io.hpp"
#include "muss/oracle.hpp"
#include "muss/selectors.hpp"

namespace muss::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitViolation = 3;

std::size_t default_workers() {
    if (const char* env = std::getenv("MUSS_WORKERS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value >= 1) return static_cast<std::size_t>(value);
    }
    return 1;
}

void log_stages(const SelectionResult& result) {
    for (const auto& st : result.stage_times) {
        std::cerr << "[stage] " << st.name << ": " << st.ms << " ms\n";
    }
    for (const auto& w : result.warnings) std::cerr << "[warn] " << w << "\n";
}

struct GenArgs {
    std::size_t n = 1000;
    std::size_t dim = 8;
    std::size_t blobs = 4;
    double spread = 1.0;
    double separation = 10.0;
    std::string quality_model = "uniform";
    double relevant_frac = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "bin";
};

int cmd_gen(const GenArgs& args) {
    SyntheticSpec spec;
    spec.n = args.n;
    spec.dim = args.dim;
    spec.blobs = args.blobs;
    spec.blob_spread = args.spread;
    spec.blob_separation = args.separation;
    spec.quality_model = quality_model_from_string(args.quality_model);
    spec.relevant_fraction = args.relevant_frac;
    spec.seed = args.seed;

    const Dataset ds = generate(spec);
    if (args.format == "bin") {
        save_dataset_binary(ds, args.out);
    } else if (args.format == "jsonl") {
        save_dataset_jsonl(ds, args.out);
    } else {
        throw InvalidArgument("unknown format '" + args.format + "' (expected bin or jsonl)");
    }
    std::cout << "wrote " << args.out << ": n=" << ds.size() << " d=" << ds.dim()
              << " blobs=" << spec.blobs << (ds.has_labels() ? " labeled" : "") << "\n";
    return kExitOk;
}

struct ClusterArgs {
    std::string input;
    std::size_t l = 0;
    double quality_weight = 0.0;
    std::uint64_t seed = 0;
    std::size_t max_iters = 100;
    double tol = 1e-6;
    std::string model_out;
    std::size_t workers = 1;
    bool l2_normalize = false;
};

int cmd_cluster(const ClusterArgs& args) {
    Dataset ds = load_dataset(args.input);
    if (args.l2_normalize) ds = ds.l2_normalized();
    KmeansOptions options;
    options.max_iters = args.max_iters;
    options.tol = args.tol;
    options.workers = args.workers;
    const ClusterModel model = kmeans_fit(ds, args.l, args.quality_weight, args.seed, options);
    save_model_json(ds, model, args.model_out);
    std::cout << "wrote " << args.model_out << ": l=" << model.l << " wcss=" << model.wcss
              << " iterations=" << model.iterations_run << "\n";
    return kExitOk;
}

struct SelectArgs {
    std::string input;
    std::string method;
    std::size_t k = 0;
    std::size_t kw = 0;
    double lambda = 0.5;
    double lambda_c = 0.5;
    std::size_t l = 0;
    std::size_t m = 0;
    std::string model_path;
    bool sigma_sweep = false;
    std::string criterion = "sum";
    bool no_normalize = false;
    bool l2_normalize = false;
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    std::string out;

    // which flags were actually present on the command line
    bool has_lambda = false;
    bool has_kw = false;
    bool has_l = false;
    bool has_m = false;
};

int cmd_select(const SelectArgs& args) {
    // Per-method flag requirements, reported together.
    std::vector<std::string> missing;
    const bool muss_family = args.method == "muss" || args.method == "muss-prime" ||
                             args.method == "rand-a" || args.method == "rand-b";
    if (muss_family || args.method == "dgds" || args.method == "mmr") {
        if (!args.has_lambda) missing.push_back("--lambda");
    }
    if (muss_family || args.method == "dgds") {
        if (!args.has_kw) missing.push_back("--kw");
        const bool model_supplies_l = !args.model_path.empty() && args.method != "rand-b" &&
                                      args.method != "dgds";
        if (!args.has_l && !model_supplies_l) missing.push_back("--l (or --model)");
    }
    if (muss_family && !args.has_m) missing.push_back("--m");
    if (!missing.empty()) {
        std::string message = "method '" + args.method + "' requires";
        for (std::size_t i = 0; i < missing.size(); ++i)
            message += (i == 0 ? " " : ", ") + missing[i];
        throw InvalidArgument(message);
    }

    Dataset ds = load_dataset(args.input);
    if (args.l2_normalize) ds = ds.l2_normalized();
    std::size_t k = args.k;
    std::string clamp_warning;
    if (k > ds.size()) {
        clamp_warning = "k = " + std::to_string(k) + " exceeds n = " +
                        std::to_string(ds.size()) + "; clamped";
        std::cerr << "[warn] " << clamp_warning << "\n";
        k = ds.size();
    }

    SelectionResult result;
    if (args.method == "mmr") {
        SelectionParams params;
        params.k = k;
        params.lambda = args.lambda;
        params.criterion = criterion_from_string(args.criterion);
        params.normalize_by_size = !args.no_normalize;
        result = args.sigma_sweep ? greedy_select_sigma_sweep(ds, ds.all_ids(), params)
                                  : greedy_select(ds, ds.all_ids(), params).result;
    } else if (args.method == "random") {
        result = baseline_select(ds, BaselineKind::Random, k, args.seed);
    } else if (args.method == "topk") {
        result = baseline_select(ds, BaselineKind::TopkQuality, k, args.seed);
    } else if (args.method == "cluster-reps") {
        result = baseline_select(ds, BaselineKind::ClusterReps, k, args.seed);
    } else if (args.method == "dgds") {
        DgdsParams params;
        params.k = k;
        params.k_within = args.kw;
        params.l = args.l;
        params.lambda = args.lambda;
        params.workers = args.workers;
        params.seed = args.seed;
        params.criterion = criterion_from_string(args.criterion);
        params.normalize_by_size = !args.no_normalize;
        params.sigma_sweep_final = args.sigma_sweep;
        result = dgds_select(ds, params);
    } else if (muss_family) {
        MussParams params;
        params.k = k;
        params.k_within = args.kw;
        params.m = args.m;
        params.lambda = args.lambda;
        params.lambda_c = args.lambda_c;
        params.sigma_final = args.method == "muss-prime" ? 0.5 : 1.0;
        params.workers = args.workers;
        params.seed = args.seed;
        params.criterion = criterion_from_string(args.criterion);
        params.normalize_by_size = !args.no_normalize;
        params.sigma_sweep_final = args.sigma_sweep;

        if (args.method == "rand-b") {
            params.l = args.l;
            result = ablation_rand_b(ds, params);
        } else {
            ClusterModel model;
            double clustering_ms = 0.0;
            if (!args.model_path.empty()) {
                model = load_model_json(args.model_path);
            } else {
                const auto start = std::chrono::steady_clock::now();
                model = kmeans_fit(ds, args.l, 0.0, args.seed, {.workers = args.workers});
                clustering_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
            }
            params.l = model.l;
            result = args.method == "rand-a" ? ablation_rand_a(ds, model, params)
                                             : muss_select(ds, model, params);
            if (clustering_ms > 0.0) {
                result.stage_times.insert(result.stage_times.begin(),
                                          {"clustering", clustering_ms});
                result.wall_time_ms += clustering_ms;
            }
        }
    } else {
        throw InvalidArgument("unknown method '" + args.method + "'");
    }

    if (!clamp_warning.empty()) result.warnings.push_back(clamp_warning);
    log_stages(result);
    if (!args.out.empty()) save_result_json(result, args.method, args.out);
    std::cout << "method=" << args.method << " k=" << result.selected.size()
              << " objective=" << result.objective << " quality=" << result.quality_term
              << " diversity=" << result.diversity_term
              << " objective_mean_scaled=" << result.objective_mean_scaled
              << " time_ms=" << result.wall_time_ms << "\n";
    return kExitOk;
}

struct BenchArgs {
    std::string input;
    std::string gen_spec;
    std::vector<std::string> methods;
    std::size_t k = 0;
    std::vector<std::size_t> kw = {10};
    std::vector<double> lambda_grid = {0.5};
    std::vector<double> lambda_c_grid = {0.5};
    std::vector<std::size_t> l = {10};
    std::vector<std::size_t> m = {5};
    std::size_t repeats = 5;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string out_csv;
    std::string out_json;
    bool l2_normalize = false;
};

SyntheticSpec parse_gen_spec(const std::string& arg) {
    json j;
    if (!arg.empty() && arg.front() == '{') {
        j = json::parse(arg);
    } else {
        std::ifstream is(arg);
        if (!is) throw DataError("cannot open gen spec '" + arg + "'");
        is >> j;
    }
    SyntheticSpec spec;
    spec.n = j.value("n", spec.n);
    spec.dim = j.value("dim", spec.dim);
    spec.blobs = j.value("blobs", spec.blobs);
    spec.blob_spread = j.value("blob_spread", spec.blob_spread);
    spec.blob_separation = j.value("blob_separation", spec.blob_separation);
    if (j.contains("quality_model"))
        spec.quality_model = quality_model_from_string(j.at("quality_model").get<std::string>());
    spec.relevant_fraction = j.value("relevant_fraction", spec.relevant_fraction);
    spec.seed = j.value("seed", spec.seed);
    return spec;
}

int cmd_bench(const BenchArgs& args) {
    if (args.input.empty() == args.gen_spec.empty())
        throw InvalidArgument("bench needs exactly one of --input or --gen-spec");
    Dataset ds =
        args.input.empty() ? generate(parse_gen_spec(args.gen_spec)) : load_dataset(args.input);
    if (args.l2_normalize) ds = ds.l2_normalized();

    BenchGrids grids;
    grids.lambda = args.lambda_grid;
    grids.lambda_c = args.lambda_c_grid;
    grids.l = args.l;
    grids.m = args.m;
    grids.k_within = args.kw;

    const BenchReport report =
        run_benchmark(ds, args.methods, grids, args.k, args.repeats, args.seed, args.workers);

    if (!args.out_csv.empty()) save_text(bench_report_to_csv(report), args.out_csv);
    if (!args.out_json.empty()) save_json(bench_report_to_json(report), args.out_json);

    std::size_t total_runs = 0;
    std::size_t failed_runs = 0;
    for (const auto& row : report.rows) {
        total_runs += row.samples.size();
        failed_runs += row.failed_runs();
        std::cout << row.method << " lambda=" << row.lambda << " lambda_c=" << row.lambda_c
                  << " objective=" << row.mean_objective();
        if (!std::isnan(row.mean_precision())) std::cout << " precision=" << row.mean_precision();
        std::cout << " time_ms=" << row.mean_time_ms() << "\n";
    }
    if (total_runs > 0 && failed_runs == total_runs) {
        std::cerr << "all benchmark runs failed\n";
        return kExitRuntime;
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string suite;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t m = 2;
    std::size_t l = 3;
    std::size_t kw = 0;
    double lambda = 0.5;
    double lambda_c = 0.5;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::string out;

    bool has_n = false;
    bool has_k = false;
    bool has_kw = false;
};

int cmd_verify(const VerifyArgs& args) {
    json report_json;
    bool passed = true;
    std::size_t violations = 0;

    if (args.suite == "lemma1") {
        Lemma1SuiteParams params;
        params.n = args.has_n ? args.n : 20;
        params.k = args.has_k ? args.k : 4;
        params.lambda = args.lambda;
        params.trials = args.trials;
        params.seed = args.seed;
        const auto report = verify_lemma1_suite(params);
        report_json = lemma1_report_to_json(report);
        passed = report.pass();
        violations = report.violations;
        std::cout << "lemma1: " << report.trials_run << " trials, "
                  << report.candidates_checked << " candidates, " << violations
                  << " violations\n";
    } else if (args.suite == "lemma8") {
        SigmaSweepSuiteParams params;
        params.n = args.has_n ? args.n : 12;
        params.k = args.has_k ? args.k : 3;
        params.lambda = args.lambda;
        params.trials = args.trials;
        params.seed = args.seed;
        const auto report = verify_sigma_sweep_suite(params);
        report_json = sigma_sweep_report_to_json(report);
        passed = report.pass();
        violations = report.violations;
        std::cout << "lemma8: " << report.trials.size() << " trials, " << violations
                  << " violations\n";
    } else if (args.suite == "theorem4" || args.suite == "theorem5") {
        BoundSuiteParams params;
        params.n = args.has_n ? args.n : 12;
        params.k = args.has_k ? args.k : 3;
        params.m = args.m;
        params.l = args.l;
        params.k_within = args.has_kw ? args.kw : params.k;
        params.lambda = args.lambda;
        params.lambda_c = args.lambda_c;
        params.trials = args.trials;
        params.seed = args.seed;
        params.scope = args.suite == "theorem4" ? BoundScope::Dgds : BoundScope::Multilevel;
        const auto report = verify_bounds(params);
        report_json = bound_report_to_json(report, args.suite);
        passed = report.pass();
        violations = report.violations;
        std::cout << args.suite << ": " << report.trials.size() << " trials, " << violations
                  << " violations\n";
    } else {
        throw InvalidArgument("unknown suite '" + args.suite +
                              "' (expected lemma1, theorem4, theorem5, or lemma8)");
    }

    if (!args.out.empty()) save_json(report_json, args.out);
    return passed ? kExitOk : kExitViolation;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"quality + diversity subset selection toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset file");
    gen_cmd->add_option("--n", gen.n, "number of items");
    gen_cmd->add_option("--dim", gen.dim, "embedding dimension");
    gen_cmd->add_option("--blobs", gen.blobs, "number of gaussian components");
    gen_cmd->add_option("--spread", gen.spread, "within-blob stddev");
    gen_cmd->add_option("--separation", gen.separation, "scale of blob centers");
    gen_cmd->add_option("--quality-model", gen.quality_model, "uniform | blob_biased");
    gen_cmd->add_option("--relevant-frac", gen.relevant_frac, "fraction labeled relevant");
    gen_cmd->add_option("--seed", gen.seed, "master seed");
    gen_cmd->add_option("--out", gen.out, "output path")->required();
    gen_cmd->add_option("--format", gen.format, "bin | jsonl");

    ClusterArgs cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "fit a cluster model, write model JSON");
    cluster_cmd->add_option("--input", cluster.input, "dataset file")->required();
    cluster_cmd->add_option("--l", cluster.l, "number of clusters")->required();
    cluster_cmd->add_option("--quality-weight", cluster.quality_weight,
                            "weight of the quality term in the clustering objective");
    cluster_cmd->add_option("--seed", cluster.seed, "seed");
    cluster_cmd->add_option("--max-iters", cluster.max_iters, "iteration cap");
    cluster_cmd->add_option("--tol", cluster.tol, "relative improvement tolerance");
    cluster_cmd->add_option("--model-out", cluster.model_out, "model JSON path")->required();
    cluster_cmd->add_flag("--l2-normalize", cluster.l2_normalize,
                          "scale embeddings to unit norm at load time");
    cluster.workers = default_workers();
    cluster_cmd->add_option("--workers", cluster.workers, "assignment-step threads");

    SelectArgs select;
    auto* select_cmd = app.add_subcommand("select", "run a selection method");
    select_cmd->add_option("--input", select.input, "dataset file")->required();
    select_cmd
        ->add_option("--method", select.method,
                     "mmr | muss | muss-prime | dgds | rand-a | rand-b | random | topk | "
                     "cluster-reps")
        ->required();
    select_cmd->add_option("--k", select.k, "selection size")->required();
    auto* kw_opt = select_cmd->add_option("--kw", select.kw, "per-cluster selection size");
    auto* lambda_opt = select_cmd->add_option("--lambda", select.lambda, "quality/diversity trade-off");
    select_cmd->add_option("--lambda-c", select.lambda_c, "cluster-level trade-off");
    auto* l_opt = select_cmd->add_option("--l", select.l, "number of clusters/partitions");
    auto* m_opt = select_cmd->add_option("--m", select.m, "number of clusters to select");
    select_cmd->add_option("--model", select.model_path, "precomputed cluster model JSON");
    select_cmd->add_flag("--sigma-sweep", select.sigma_sweep,
                         "sweep sigma in {0, 0.5, 1} on the final stage");
    select_cmd->add_option("--criterion", select.criterion, "sum | min");
    select_cmd->add_flag("--no-normalize", select.no_normalize,
                         "do not divide distance sums by |S|");
    select_cmd->add_flag("--l2-normalize", select.l2_normalize,
                         "scale embeddings to unit norm at load time");
    select.workers = default_workers();
    select_cmd->add_option("--workers", select.workers, "worker threads");
    select_cmd->add_option("--seed", select.seed, "seed");
    select_cmd->add_option("--out", select.out, "result JSON path");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "benchmark methods over a parameter grid");
    bench_cmd->add_option("--input", bench.input, "dataset file");
    bench_cmd->add_option("--gen-spec", bench.gen_spec, "synthetic spec JSON (path or inline)");
    bench_cmd->add_option("--methods", bench.methods, "comma-separated methods")
        ->required()
        ->delimiter(',');
    bench_cmd->add_option("--k", bench.k, "selection size")->required();
    bench_cmd->add_option("--kw", bench.kw, "per-cluster sizes")->delimiter(',');
    bench_cmd->add_option("--lambda-grid", bench.lambda_grid, "lambda values")->delimiter(',');
    bench_cmd->add_option("--lambda-c-grid", bench.lambda_c_grid, "lambda_c values")
        ->delimiter(',');
    bench_cmd->add_option("--l", bench.l, "cluster counts")->delimiter(',');
    bench_cmd->add_option("--m", bench.m, "selected cluster counts")->delimiter(',');
    bench_cmd->add_option("--repeats", bench.repeats, "repeats per cell");
    bench_cmd->add_option("--seed", bench.seed, "master seed");
    bench.workers = default_workers();
    bench_cmd->add_option("--workers", bench.workers, "worker threads inside selectors");
    bench_cmd->add_option("--out-csv", bench.out_csv, "CSV report path");
    bench_cmd->add_option("--out-json", bench.out_json, "JSON report path");
    bench_cmd->add_flag("--l2-normalize", bench.l2_normalize,
                        "scale embeddings to unit norm at load time");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "run a bound-verification suite");
    verify_cmd->add_option("--suite", verify.suite, "lemma1 | theorem4 | theorem5 | lemma8")
        ->required();
    auto* n_opt = verify_cmd->add_option("--n", verify.n, "instance size");
    auto* k_opt = verify_cmd->add_option("--k", verify.k, "selection size");
    verify_cmd->add_option("--m", verify.m, "clusters to select");
    verify_cmd->add_option("--l", verify.l, "clusters/partitions");
    auto* vkw_opt = verify_cmd->add_option("--kw", verify.kw, "per-cluster selection size");
    verify_cmd->add_option("--lambda", verify.lambda, "trade-off");
    verify_cmd->add_option("--lambda-c", verify.lambda_c, "cluster-level trade-off");
    verify_cmd->add_option("--trials", verify.trials, "number of random instances");
    verify_cmd->add_option("--seed", verify.seed, "master seed");
    verify_cmd->add_option("--out", verify.out, "report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    select.has_lambda = lambda_opt->count() > 0;
    select.has_kw = kw_opt->count() > 0;
    select.has_l = l_opt->count() > 0;
    select.has_m = m_opt->count() > 0;
    verify.has_n = n_opt->count() > 0;
    verify.has_k = k_opt->count() > 0;
    verify.has_kw = vkw_opt->count() > 0;

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (cluster_cmd->parsed()) return cmd_cluster(cluster);
        if (select_cmd->parsed()) return cmd_select(select);
        if (bench_cmd->parsed()) return cmd_bench(bench);
        if (verify_cmd->parsed()) return cmd_verify(verify);
    } catch (const InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace muss::cli
