#include "muss/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "muss/error.hpp"

namespace muss {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void finalize_result(const Dataset& ds, SelectionResult& result, double lambda) {
    const auto breakdown = objective(ds, result.selected, lambda);
    result.objective = breakdown.objective;
    result.quality_term = breakdown.quality;
    result.diversity_term = breakdown.diversity;
    result.objective_mean_scaled =
        mean_scaled_objective(breakdown.quality, breakdown.diversity, result.selected.size(), lambda);
}

void echo_params(SelectionResult& result, const SelectionParams& params) {
    result.params_echo.set("k", static_cast<std::uint64_t>(params.k));
    result.params_echo.set("lambda", params.lambda);
    result.params_echo.set("criterion", to_string(params.criterion));
    result.params_echo.set("sigma", params.sigma);
    result.params_echo.set("normalize_by_size", params.normalize_by_size ? "true" : "false");
}

}  // namespace

GreedyOutput greedy_select(const Dataset& ds, std::span<const ItemId> pool,
                           const SelectionParams& params) {
    params.validate();
    if (pool.empty()) throw InvalidArgument("greedy_select: pool is empty");
    validate_ids(ds, pool, "greedy_select");

    const auto start = Clock::now();

    std::vector<ItemId> ids(pool.begin(), pool.end());
    std::sort(ids.begin(), ids.end());

    const std::size_t n = ids.size();
    const std::size_t k = std::min(params.k, n);
    const bool use_min = params.criterion == Criterion::MinDistance;

    // Per-candidate running aggregate of distances to the selection:
    // a sum for the sum-distance criterion, a minimum otherwise.
    std::vector<double> aggregate(n, use_min ? std::numeric_limits<double>::infinity() : 0.0);
    std::vector<char> taken(n, 0);

    GreedyOutput out;
    out.trace.picks.reserve(k);
    out.trace.gains.reserve(k);
    out.trace.candidate_pool_sizes.reserve(k);

    // First pick: highest quality, ties to the smallest id.
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (ds.quality(ids[i]) > ds.quality(ids[best])) best = i;
    }
    taken[best] = 1;
    out.trace.picks.push_back(ids[best]);
    out.trace.gains.push_back(ds.quality(ids[best]));
    out.trace.candidate_pool_sizes.push_back(n);

    const double quality_weight = params.sigma * params.lambda;
    const double diversity_weight = 1.0 - params.lambda;

    for (std::size_t step = 1; step < k; ++step) {
        const ItemId last = out.trace.picks.back();
        const auto last_emb = ds.embedding(last);
        const double selected_count = static_cast<double>(step);

        std::size_t best_idx = n;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const double d = euclidean(ds.embedding(ids[i]), last_emb);
            if (use_min) {
                if (d < aggregate[i]) aggregate[i] = d;
            } else {
                aggregate[i] += d;
            }
            double g = aggregate[i];
            if (!use_min && params.normalize_by_size) g /= selected_count;
            const double gain = quality_weight * ds.quality(ids[i]) + diversity_weight * g;
            if (gain > best_gain) {
                best_gain = gain;
                best_idx = i;
            }
        }
        taken[best_idx] = 1;
        out.trace.picks.push_back(ids[best_idx]);
        out.trace.gains.push_back(best_gain);
        out.trace.candidate_pool_sizes.push_back(n - step);
    }

    out.result.selected = out.trace.picks;
    finalize_result(ds, out.result, params.lambda);
    echo_params(out.result, params);
    out.result.wall_time_ms = elapsed_ms(start);
    return out;
}

SelectionResult greedy_select_sigma_sweep(const Dataset& ds, std::span<const ItemId> pool,
                                          const SelectionParams& params) {
    params.validate();
    const auto start = Clock::now();

    SelectionResult best;
    double best_sigma = 0.0;
    bool have_best = false;
    for (double sigma : {0.0, 0.5, 1.0}) {
        SelectionParams run = params;
        run.sigma = sigma;
        SelectionResult candidate = greedy_select(ds, pool, run).result;
        if (!have_best || candidate.objective > best.objective) {
            best = std::move(candidate);
            best_sigma = sigma;
            have_best = true;
        }
    }
    // "sigma" stays the winning run's value (truthful provenance of the picks).
    best.params_echo.set("sigma_selected", best_sigma);
    best.params_echo.set("sigma_sweep", "true");
    best.wall_time_ms = elapsed_ms(start);
    return best;
}

SelectionGapReport check_lemma1(const Dataset& ds, std::span<const ItemId> pool,
                                const SelectionResult& result, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw InvalidArgument("check_lemma1: requires 0 < lambda < 1");
    const std::size_t k = result.selected.size();
    if (k <= 1) throw InvalidArgument("check_lemma1: requires k > 1 selected items");
    if (const std::string* sigma = result.params_echo.find("sigma");
        sigma != nullptr && *sigma != "1") {
        throw InvalidArgument("check_lemma1: requires a sigma = 1 greedy result");
    }
    if (const std::string* criterion = result.params_echo.find("criterion");
        criterion != nullptr && *criterion != "sum") {
        throw InvalidArgument("check_lemma1: requires the sum-distance criterion");
    }
    if (const std::string* norm = result.params_echo.find("normalize_by_size");
        norm != nullptr && *norm != "false") {
        throw InvalidArgument("check_lemma1: requires the unnormalized criterion");
    }
    validate_ids(ds, pool, "check_lemma1");

    const double f = objective(ds, result.selected, lambda).objective;
    const double kd = static_cast<double>(k);
    const double quality_bound = f / (kd * lambda);
    const double distance_bound = 2.5 * f / (kd * (kd - 1.0) * (1.0 - lambda));

    std::vector<char> in_selection(ds.size(), 0);
    for (ItemId id : result.selected) in_selection[id] = 1;

    // Tiny float slack so exact-boundary cases do not flap.
    const auto holds = [](double lhs, double rhs) {
        return lhs <= rhs * (1.0 + 1e-9) + 1e-12;
    };

    SelectionGapReport report;
    for (ItemId t : pool) {
        if (in_selection[t]) continue;
        SelectionGapEntry entry;
        entry.candidate = t;
        entry.quality_gain = ds.quality(t);
        entry.quality_bound = quality_bound;
        entry.min_distance = std::numeric_limits<double>::infinity();
        for (ItemId z : result.selected) {
            entry.min_distance = std::min(entry.min_distance, distance(ds, t, z));
        }
        entry.distance_bound = distance_bound;
        entry.pass = holds(entry.quality_gain, entry.quality_bound) &&
                     holds(entry.min_distance, entry.distance_bound);
        if (!entry.pass) ++report.failures;
        report.entries.push_back(entry);
    }
    return report;
}

}  // namespace muss
