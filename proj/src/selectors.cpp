#include "muss/selectors.hpp"

#include <algorithm>
#include <chrono>
#include <thread>
#include <unordered_set>

#include "muss/error.hpp"
#include "muss/rng.hpp"

namespace muss {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void run_striped(std::size_t tasks, std::size_t workers, const auto& body) {
    workers = std::max<std::size_t>(1, std::min(workers, tasks));
    if (workers == 1) {
        for (std::size_t i = 0; i < tasks; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < tasks; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
}

Dataset summaries_to_dataset(const std::vector<ClusterSummary>& summaries, std::size_t dim) {
    std::vector<double> embeddings;
    embeddings.reserve(summaries.size() * dim);
    std::vector<double> qualities;
    qualities.reserve(summaries.size());
    for (const auto& s : summaries) {
        embeddings.insert(embeddings.end(), s.centroid.begin(), s.centroid.end());
        qualities.push_back(s.median_quality);
    }
    return Dataset(dim, std::move(embeddings), std::move(qualities));
}

std::vector<ClusterSummary> partition_summaries(const Dataset& ds,
                                                const std::vector<std::vector<ItemId>>& parts) {
    std::vector<ClusterSummary> summaries;
    summaries.reserve(parts.size());
    for (std::size_t p = 0; p < parts.size(); ++p) {
        ClusterSummary s;
        s.cluster_id = static_cast<std::uint32_t>(p);
        s.member_ids = parts[p];
        s.size = s.member_ids.size();
        s.centroid.assign(ds.dim(), 0.0);
        std::vector<double> qualities;
        qualities.reserve(s.size);
        for (ItemId id : s.member_ids) {
            auto e = ds.embedding(id);
            for (std::size_t c = 0; c < ds.dim(); ++c) s.centroid[c] += e[c];
            qualities.push_back(ds.quality(id));
        }
        for (double& v : s.centroid) v /= static_cast<double>(s.size);
        for (ItemId id : s.member_ids) {
            s.radius = std::max(s.radius, euclidean(ds.embedding(id), s.centroid));
        }
        std::sort(qualities.begin(), qualities.end());
        const std::size_t mid = qualities.size() / 2;
        s.median_quality = qualities.size() % 2 == 1
                               ? qualities[mid]
                               : 0.5 * (qualities[mid - 1] + qualities[mid]);
        summaries.push_back(std::move(s));
    }
    return summaries;
}

void echo_multilevel(SelectionResult& result, const MussParams& params) {
    result.params_echo.set("k", static_cast<std::uint64_t>(params.k));
    result.params_echo.set("k_within", static_cast<std::uint64_t>(params.k_within));
    result.params_echo.set("l", static_cast<std::uint64_t>(params.l));
    result.params_echo.set("m", static_cast<std::uint64_t>(params.m));
    result.params_echo.set("lambda", params.lambda);
    result.params_echo.set("lambda_c", params.lambda_c);
    result.params_echo.set("sigma_final", params.sigma_final);
    result.params_echo.set("workers", static_cast<std::uint64_t>(params.workers));
    result.params_echo.set("seed", params.seed);
    result.params_echo.set("criterion", to_string(params.criterion));
    result.params_echo.set("normalize_by_size", params.normalize_by_size ? "true" : "false");
}

// Stages 2-4 of the multilevel pipeline, shared by the clustered selector
// and both ablations: per-cluster greedy over the chosen summaries, union
// with the global top-k quality ids, final greedy refinement.
SelectionResult multilevel_finish(const Dataset& ds, const std::vector<ClusterSummary>& summaries,
                                  const std::vector<std::size_t>& chosen,
                                  const MussParams& params, SelectionResult result,
                                  Clock::time_point start) {
    auto stage_start = Clock::now();

    std::vector<std::vector<ItemId>> within(chosen.size());
    run_striped(chosen.size(), params.workers, [&](std::size_t slot) {
        const ClusterSummary& cluster = summaries[chosen[slot]];
        SelectionParams within_params;
        within_params.k = params.k_within;
        within_params.lambda = params.lambda;
        within_params.criterion = params.criterion;
        within_params.normalize_by_size = params.normalize_by_size;
        within[slot] = greedy_select(ds, cluster.member_ids, within_params).result.selected;
    });
    result.stage_times.push_back({"within_cluster", elapsed_ms(stage_start)});

    stage_start = Clock::now();
    const std::vector<ItemId> top_quality = top_k_quality(ds, std::min(params.k, ds.size()));
    result.stage_times.push_back({"topk", elapsed_ms(stage_start)});

    // Union in canonical order: ascending chosen-cluster slot (slots are
    // pre-sorted by cluster id), pick order within, then the top-quality
    // ids; deduplicated keeping first occurrence.
    stage_start = Clock::now();
    std::vector<ItemId> pool;
    pool.reserve(chosen.size() * params.k_within + top_quality.size());
    std::unordered_set<ItemId> seen;
    const auto push_unique = [&](ItemId id) {
        if (seen.insert(id).second) pool.push_back(id);
    };
    for (const auto& picks : within) {
        for (ItemId id : picks) push_unique(id);
    }
    for (ItemId id : top_quality) push_unique(id);

    SelectionParams final_params;
    final_params.k = params.k;
    final_params.lambda = params.lambda;
    final_params.criterion = params.criterion;
    final_params.sigma = params.sigma_final;
    final_params.normalize_by_size = params.normalize_by_size;
    SelectionResult final_result = params.sigma_sweep_final
                                       ? greedy_select_sigma_sweep(ds, pool, final_params)
                                       : greedy_select(ds, pool, final_params).result;
    result.stage_times.push_back({"final", elapsed_ms(stage_start)});

    result.selected = std::move(final_result.selected);
    result.objective = final_result.objective;
    result.quality_term = final_result.quality_term;
    result.diversity_term = final_result.diversity_term;
    result.objective_mean_scaled = final_result.objective_mean_scaled;
    echo_multilevel(result, params);
    result.params_echo.set("final_pool_size", static_cast<std::uint64_t>(pool.size()));
    if (params.sigma_sweep_final) {
        if (const std::string* chosen = final_result.params_echo.find("sigma_selected"))
            result.params_echo.set("sigma_selected", *chosen);
        result.params_echo.set("sigma_sweep", "true");
    }
    result.wall_time_ms = elapsed_ms(start);
    return result;
}

void warn_if_clamped(const MussParams& params, std::size_t available, SelectionResult& result) {
    if (params.m > available) {
        result.warnings.push_back("m = " + std::to_string(params.m) +
                                  " exceeds available clusters; clamped to " +
                                  std::to_string(available));
    }
}

}  // namespace

void MussParams::validate() const {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (k_within == 0) throw InvalidArgument("k_within must be >= 1");
    if (l == 0) throw InvalidArgument("l must be >= 1");
    if (m == 0) throw InvalidArgument("m must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must be in [0, 1]");
    if (!(lambda_c >= 0.0 && lambda_c <= 1.0)) throw InvalidArgument("lambda_c must be in [0, 1]");
    if (!(sigma_final >= 0.0)) throw InvalidArgument("sigma_final must be >= 0");
    if (workers == 0) throw InvalidArgument("workers must be >= 1");
}

void DgdsParams::validate() const {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (k_within == 0) throw InvalidArgument("k_within must be >= 1");
    if (l == 0) throw InvalidArgument("l must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must be in [0, 1]");
    if (workers == 0) throw InvalidArgument("workers must be >= 1");
}

std::vector<ItemId> top_k_quality(const Dataset& ds, std::size_t k) {
    std::vector<ItemId> ids = ds.all_ids();
    std::sort(ids.begin(), ids.end(), [&](ItemId a, ItemId b) {
        if (ds.quality(a) != ds.quality(b)) return ds.quality(a) > ds.quality(b);
        return a < b;
    });
    ids.resize(std::min(k, ids.size()));
    return ids;
}

SelectionResult muss_select(const Dataset& ds, const ClusterModel& model,
                            const MussParams& params) {
    params.validate();
    const auto start = Clock::now();
    SelectionResult result;

    auto stage_start = Clock::now();
    const auto summaries = summarize_clusters(ds, model);
    warn_if_clamped(params, summaries.size(), result);
    const std::size_t m = std::min(params.m, summaries.size());

    const Dataset cluster_ds = summaries_to_dataset(summaries, ds.dim());
    SelectionParams cluster_params;
    cluster_params.k = m;
    cluster_params.lambda = params.lambda_c;
    cluster_params.criterion = Criterion::SumDistance;
    cluster_params.normalize_by_size = false;
    auto cluster_sel = greedy_select(cluster_ds, cluster_ds.all_ids(), cluster_params);

    std::vector<std::size_t> chosen(cluster_sel.result.selected.begin(),
                                    cluster_sel.result.selected.end());
    std::sort(chosen.begin(), chosen.end());
    result.stage_times.push_back({"cluster_select", elapsed_ms(stage_start)});

    return multilevel_finish(ds, summaries, chosen, params, std::move(result), start);
}

SelectionResult ablation_rand_a(const Dataset& ds, const ClusterModel& model,
                                const MussParams& params) {
    params.validate();
    const auto start = Clock::now();
    SelectionResult result;

    auto stage_start = Clock::now();
    const auto summaries = summarize_clusters(ds, model);
    warn_if_clamped(params, summaries.size(), result);
    const std::size_t m = std::min(params.m, summaries.size());

    Rng rng(derive_seed(params.seed, {fnv1a("rand-a")}));
    auto sample = rng.sample_without_replacement(summaries.size(), m);
    std::vector<std::size_t> chosen(sample.begin(), sample.end());
    std::sort(chosen.begin(), chosen.end());
    result.stage_times.push_back({"cluster_select", elapsed_ms(stage_start)});

    auto out = multilevel_finish(ds, summaries, chosen, params, std::move(result), start);
    out.params_echo.set("cluster_choice", "random");
    return out;
}

SelectionResult ablation_rand_b(const Dataset& ds, const MussParams& params) {
    params.validate();
    const auto start = Clock::now();
    SelectionResult result;

    auto stage_start = Clock::now();
    const auto parts = random_partition(ds, std::min(params.l, ds.size()), params.seed);
    const auto summaries = partition_summaries(ds, parts);
    result.stage_times.push_back({"clustering", elapsed_ms(stage_start)});

    stage_start = Clock::now();
    warn_if_clamped(params, summaries.size(), result);
    const std::size_t m = std::min(params.m, summaries.size());

    const Dataset cluster_ds = summaries_to_dataset(summaries, ds.dim());
    SelectionParams cluster_params;
    cluster_params.k = m;
    cluster_params.lambda = params.lambda_c;
    cluster_params.criterion = Criterion::SumDistance;
    cluster_params.normalize_by_size = false;
    auto cluster_sel = greedy_select(cluster_ds, cluster_ds.all_ids(), cluster_params);

    std::vector<std::size_t> chosen(cluster_sel.result.selected.begin(),
                                    cluster_sel.result.selected.end());
    std::sort(chosen.begin(), chosen.end());
    result.stage_times.push_back({"cluster_select", elapsed_ms(stage_start)});

    auto out = multilevel_finish(ds, summaries, chosen, params, std::move(result), start);
    out.params_echo.set("partitioning", "random");
    return out;
}

SelectionResult dgds_select(const Dataset& ds, const DgdsParams& params) {
    params.validate();
    const auto start = Clock::now();
    SelectionResult result;

    auto stage_start = Clock::now();
    const auto parts = random_partition(ds, std::min(params.l, ds.size()), params.seed);
    result.stage_times.push_back({"partition", elapsed_ms(stage_start)});

    stage_start = Clock::now();
    std::vector<std::vector<ItemId>> within(parts.size());
    run_striped(parts.size(), params.workers, [&](std::size_t p) {
        SelectionParams within_params;
        within_params.k = params.k_within;
        within_params.lambda = params.lambda;
        within_params.criterion = params.criterion;
        within_params.normalize_by_size = params.normalize_by_size;
        within[p] = greedy_select(ds, parts[p], within_params).result.selected;
    });
    result.stage_times.push_back({"within_cluster", elapsed_ms(stage_start)});

    stage_start = Clock::now();
    std::vector<ItemId> pool;
    for (const auto& picks : within) pool.insert(pool.end(), picks.begin(), picks.end());

    SelectionParams final_params;
    final_params.k = params.k;
    final_params.lambda = params.lambda;
    final_params.criterion = params.criterion;
    final_params.normalize_by_size = params.normalize_by_size;
    SelectionResult final_result = params.sigma_sweep_final
                                       ? greedy_select_sigma_sweep(ds, pool, final_params)
                                       : greedy_select(ds, pool, final_params).result;
    result.stage_times.push_back({"final", elapsed_ms(stage_start)});

    result.selected = std::move(final_result.selected);
    result.objective = final_result.objective;
    result.quality_term = final_result.quality_term;
    result.diversity_term = final_result.diversity_term;
    result.objective_mean_scaled = final_result.objective_mean_scaled;
    result.params_echo.set("k", static_cast<std::uint64_t>(params.k));
    result.params_echo.set("k_within", static_cast<std::uint64_t>(params.k_within));
    result.params_echo.set("l", static_cast<std::uint64_t>(params.l));
    result.params_echo.set("lambda", params.lambda);
    result.params_echo.set("workers", static_cast<std::uint64_t>(params.workers));
    result.params_echo.set("seed", params.seed);
    result.params_echo.set("criterion", to_string(params.criterion));
    result.params_echo.set("normalize_by_size", params.normalize_by_size ? "true" : "false");
    result.params_echo.set("final_pool_size", static_cast<std::uint64_t>(pool.size()));
    if (params.sigma_sweep_final) {
        if (const std::string* chosen = final_result.params_echo.find("sigma_selected"))
            result.params_echo.set("sigma_selected", *chosen);
        result.params_echo.set("sigma_sweep", "true");
    }
    result.wall_time_ms = elapsed_ms(start);
    return result;
}

BaselineKind baseline_kind_from_string(const std::string& s) {
    if (s == "random") return BaselineKind::Random;
    if (s == "topk" || s == "topk_quality") return BaselineKind::TopkQuality;
    if (s == "cluster-reps" || s == "cluster_reps") return BaselineKind::ClusterReps;
    throw InvalidArgument("unknown baseline '" + s + "'");
}

SelectionResult baseline_select(const Dataset& ds, BaselineKind kind, std::size_t k,
                                std::uint64_t seed) {
    if (k == 0) throw InvalidArgument("baseline_select: k must be >= 1");
    if (k > ds.size())
        throw InvalidArgument("baseline_select: k = " + std::to_string(k) + " exceeds n = " +
                              std::to_string(ds.size()));
    const auto start = Clock::now();
    SelectionResult result;
    std::string name;

    switch (kind) {
        case BaselineKind::Random: {
            name = "random";
            Rng rng(derive_seed(seed, {fnv1a("baseline-random")}));
            result.selected = rng.sample_without_replacement(ds.size(), k);
            break;
        }
        case BaselineKind::TopkQuality: {
            name = "topk";
            result.selected = top_k_quality(ds, k);
            break;
        }
        case BaselineKind::ClusterReps: {
            name = "cluster-reps";
            const auto model = kmeans_fit(ds, k, 0.0, seed);
            const auto summaries = summarize_clusters(ds, model);
            for (const auto& s : summaries) {
                ItemId best = s.member_ids.front();
                for (ItemId id : s.member_ids) {
                    if (ds.quality(id) > ds.quality(best)) best = id;
                }
                result.selected.push_back(best);
            }
            break;
        }
    }

    const double lambda = 0.5;  // reporting only; baselines have no trade-off knob
    const auto breakdown = objective(ds, result.selected, lambda);
    result.objective = breakdown.objective;
    result.quality_term = breakdown.quality;
    result.diversity_term = breakdown.diversity;
    result.objective_mean_scaled =
        mean_scaled_objective(breakdown.quality, breakdown.diversity, result.selected.size(), lambda);
    result.params_echo.set("baseline", name);
    result.params_echo.set("lambda", lambda);
    result.params_echo.set("k", static_cast<std::uint64_t>(k));
    result.params_echo.set("seed", seed);
    result.wall_time_ms = elapsed_ms(start);
    return result;
}

Theorem5Bound compute_theorem5_bound(const MussParams& params, double r) {
    if (params.k <= 1) throw InvalidArgument("theorem5 bound: requires k > 1");
    if (params.m <= 1) throw InvalidArgument("theorem5 bound: requires m > 1");
    if (params.k < params.m) throw InvalidArgument("theorem5 bound: requires k >= m");
    if (!(params.lambda > 0.0 && params.lambda < 1.0))
        throw InvalidArgument("theorem5 bound: requires 0 < lambda < 1");
    if (!(params.lambda_c < 1.0)) throw InvalidArgument("theorem5 bound: requires lambda_c < 1");
    if (r < 0.0) throw InvalidArgument("theorem5 bound: requires r >= 0");

    const double k = static_cast<double>(params.k);
    const double m = static_cast<double>(params.m);
    const double pairs_ratio = (k * (k - 1.0)) / (m * (m - 1.0));
    const double lambda_ratio = (1.0 - params.lambda) / (1.0 - params.lambda_c);

    Theorem5Bound bound;
    bound.alpha = 2.0 * (5.0 * pairs_ratio * lambda_ratio + 2.0);
    bound.beta = k * (k - 1.0) *
                 (4.0 * (1.0 - params.lambda) + 5.0 * (1.0 - params.lambda) / (1.0 - params.lambda_c));
    bound.r = r;
    return bound;
}

}  // namespace muss
