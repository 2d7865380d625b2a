#include "muss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "muss/bench.hpp"
#include "muss/error.hpp"
#include "muss/rng.hpp"

namespace muss {

namespace {

// C(n, k), saturating at cap + 1 to avoid overflow.
std::uint64_t combinations_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double acc = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (acc > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<std::uint64_t>(acc + 0.5L);
}

// lhs <= rhs with a hair of float slack.
BoundCheck make_check(double lhs, double rhs) {
    BoundCheck c;
    c.lhs = lhs;
    c.rhs = rhs;
    c.pass = lhs <= rhs + 1e-9 * std::max(std::abs(rhs), 1.0);
    return c;
}

// Small random instance shared by all verification suites: a few gaussian
// blobs with uniform qualities in (0, 1].
Dataset trial_dataset(std::size_t n, std::size_t dim, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n = n;
    spec.dim = dim;
    spec.blobs = std::min<std::size_t>(3, n);
    spec.blob_spread = 0.6;
    spec.blob_separation = 3.0;
    spec.quality_model = QualityModel::Uniform;
    spec.relevant_fraction = 0.0;
    spec.seed = seed;
    return generate(spec);
}

std::string describe_instance(const char* suite, std::size_t trial, std::uint64_t seed,
                              const char* bound, double lhs, double rhs) {
    std::ostringstream os;
    os << suite << " trial " << trial << " (instance seed " << seed << "): " << bound
       << " violated, lhs=" << lhs << " rhs=" << rhs;
    return os.str();
}

}  // namespace

BruteForceResult opt_brute_force(const Dataset& ds, std::span<const ItemId> pool, std::size_t k,
                                 double lambda, std::uint64_t subset_cap) {
    if (k == 0) throw InvalidArgument("opt_brute_force: k must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidArgument("opt_brute_force: lambda must be in [0, 1]");
    validate_ids(ds, pool, "opt_brute_force");
    if (pool.empty()) throw InvalidArgument("opt_brute_force: pool is empty");
    if (k > pool.size())
        throw InvalidArgument("opt_brute_force: k = " + std::to_string(k) +
                              " exceeds pool size " + std::to_string(pool.size()));

    const std::uint64_t count = combinations_capped(pool.size(), k, subset_cap);
    if (count > subset_cap)
        throw InvalidArgument("opt_brute_force: C(" + std::to_string(pool.size()) + ", " +
                              std::to_string(k) + ") exceeds the cap of " +
                              std::to_string(subset_cap) + " subsets; shrink the instance");

    std::vector<ItemId> ids(pool.begin(), pool.end());
    std::sort(ids.begin(), ids.end());
    const std::size_t n = ids.size();

    // Pairwise distances once; subsets then cost O(k^2) lookups each.
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(ds, ids[i], ids[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;

    BruteForceResult best;
    best.f_opt = -std::numeric_limits<double>::infinity();
    for (;;) {
        double quality = 0.0;
        double diversity = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            quality += ds.quality(ids[combo[i]]);
            for (std::size_t j = i + 1; j < k; ++j) diversity += dist[combo[i] * n + combo[j]];
        }
        diversity *= 2.0;
        const double f = lambda * quality + (1.0 - lambda) * diversity;
        // Strict improvement keeps the lexicographically smallest maximizer.
        if (f > best.f_opt) {
            best.f_opt = f;
            best.best_set.resize(k);
            for (std::size_t i = 0; i < k; ++i) best.best_set[i] = ids[combo[i]];
        }

        // Advance to the next combination in lexicographic order.
        std::size_t pos = k;
        while (pos > 0 && combo[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++combo[pos - 1];
        for (std::size_t i = pos; i < k; ++i) combo[i] = combo[i - 1] + 1;
    }
    return best;
}

void BoundSuiteParams::validate() const {
    if (n == 0 || k == 0 || l == 0 || k_within == 0)
        throw InvalidArgument("verify_bounds: sizes must be >= 1");
    if (k > n) throw InvalidArgument("verify_bounds: k exceeds n");
    if (l > n) throw InvalidArgument("verify_bounds: l exceeds n");
    if (k <= 1) throw InvalidArgument("verify_bounds: requires k > 1");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw InvalidArgument("verify_bounds: requires 0 < lambda < 1");
    if (dim == 0) throw InvalidArgument("verify_bounds: dim must be >= 1");
    if (scope != BoundScope::Dgds) {
        if (m <= 1) throw InvalidArgument("verify_bounds: requires m > 1");
        if (k < m) throw InvalidArgument("verify_bounds: requires k >= m");
        if (m > l) throw InvalidArgument("verify_bounds: requires m <= l");
        if (!(lambda_c < 1.0)) throw InvalidArgument("verify_bounds: requires lambda_c < 1");
    }
}

BoundReport verify_bounds(const BoundSuiteParams& params) {
    params.validate();
    BoundReport report;
    report.params = params;

    for (std::size_t t = 0; t < params.trials; ++t) {
        const std::uint64_t seed = derive_seed(params.seed, {fnv1a("bound-trial"), t});
        const Dataset ds = trial_dataset(params.n, params.dim, seed);
        const auto pool = ds.all_ids();

        BoundTrial trial;
        trial.trial = t;
        trial.seed = seed;

        const auto opt_caller =
            opt_brute_force(ds, pool, params.k, params.lambda, params.subset_cap);
        trial.f_opt = opt_caller.f_opt;

        if (params.scope != BoundScope::Multilevel) {
            DgdsParams dgds;
            dgds.k = params.k;
            dgds.k_within = params.k_within;
            dgds.l = params.l;
            dgds.workers = 1;
            dgds.seed = seed;
            dgds.criterion = Criterion::SumDistance;
            dgds.normalize_by_size = false;

            dgds.lambda = params.lambda;
            trial.dgds_caller =
                make_check(opt_caller.f_opt / 16.0, dgds_select(ds, dgds).objective);

            const auto opt_half =
                params.lambda == 0.5
                    ? opt_caller
                    : opt_brute_force(ds, pool, params.k, 0.5, params.subset_cap);
            dgds.lambda = 0.5;
            trial.dgds_half = make_check(opt_half.f_opt / 16.0, dgds_select(ds, dgds).objective);

            // Union-level inequalities live in the equal-weight setting
            // where the objective is the plain sum Q + D; greedy at
            // lambda = 0.5 makes the same picks, and Q + D = 2 * F(. | 0.5).
            const auto parts = random_partition(ds, std::min(params.l, ds.size()), seed);
            std::vector<ItemId> unioned;
            SelectionParams within;
            within.k = params.k_within;
            within.lambda = 0.5;
            within.criterion = Criterion::SumDistance;
            within.normalize_by_size = false;
            for (const auto& part : parts) {
                const auto picks = greedy_select(ds, part, within).result.selected;
                unioned.insert(unioned.end(), picks.begin(), picks.end());
            }
            if (unioned.size() >= params.k &&
                combinations_capped(unioned.size(), params.k, params.subset_cap) <=
                    params.subset_cap) {
                const auto opt_union =
                    opt_brute_force(ds, unioned, params.k, 0.5, params.subset_cap);
                const auto union_breakdown = objective(ds, opt_union.best_set, 0.5);
                const double union_sum = union_breakdown.quality + union_breakdown.diversity;
                const auto o_half = objective(ds, opt_half.best_set, 0.5);
                trial.union_diversity = make_check(o_half.diversity, 6.0 * union_sum);
                trial.union_quality = make_check(o_half.quality, 2.0 * union_sum);
            } else {
                ++report.union_checks_skipped;
            }
        }

        if (params.scope != BoundScope::Dgds) {
            // Clustered variant with the 0.5 final-stage quality scaler.
            const auto model = kmeans_fit(ds, params.l, 0.0, seed);
            MussParams muss;
            muss.k = params.k;
            muss.k_within = params.k_within;
            muss.l = params.l;
            muss.m = params.m;
            muss.lambda = params.lambda;
            muss.lambda_c = params.lambda_c;
            muss.sigma_final = 0.5;
            muss.workers = 1;
            muss.seed = seed;
            muss.criterion = Criterion::SumDistance;
            muss.normalize_by_size = false;
            const auto muss_result = muss_select(ds, model, muss);

            trial.radius = max_radius(summarize_clusters(ds, model));
            const auto bound = compute_theorem5_bound(muss, trial.radius);
            trial.alpha = bound.alpha;
            trial.beta = bound.beta;
            trial.multilevel = make_check(bound.rhs(opt_caller.f_opt), muss_result.objective);
        }

        const auto record = [&](const std::optional<BoundCheck>& check, const char* bound_name) {
            if (check && !check->pass) {
                ++report.violations;
                report.violation_details.push_back(describe_instance(
                    "verify_bounds", t, seed, bound_name, check->lhs, check->rhs));
            }
        };
        record(trial.dgds_caller, "dgds >= opt/16 (caller lambda)");
        record(trial.dgds_half, "dgds >= opt/16 (lambda = 0.5)");
        record(trial.multilevel, "multilevel' >= opt/alpha - r*beta/alpha");
        record(trial.union_diversity, "D(opt) <= 6 (Q+D)(opt over union)");
        record(trial.union_quality, "Q(opt) <= 2 (Q+D)(opt over union)");

        report.trials.push_back(trial);
    }
    return report;
}

void Lemma1SuiteParams::validate() const {
    if (n == 0 || k == 0) throw InvalidArgument("lemma1 suite: sizes must be >= 1");
    if (k <= 1) throw InvalidArgument("lemma1 suite: requires k > 1");
    if (k > n) throw InvalidArgument("lemma1 suite: k exceeds n");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw InvalidArgument("lemma1 suite: requires 0 < lambda < 1");
    if (dim == 0) throw InvalidArgument("lemma1 suite: dim must be >= 1");
}

Lemma1SuiteReport verify_lemma1_suite(const Lemma1SuiteParams& params) {
    params.validate();
    Lemma1SuiteReport report;
    report.params = params;
    double min_quality_slack = std::numeric_limits<double>::infinity();
    double min_distance_slack = std::numeric_limits<double>::infinity();

    for (std::size_t t = 0; t < params.trials; ++t) {
        const std::uint64_t seed = derive_seed(params.seed, {fnv1a("lemma1-trial"), t});
        const Dataset ds = trial_dataset(params.n, params.dim, seed);
        const auto pool = ds.all_ids();

        SelectionParams sel;
        sel.k = params.k;
        sel.lambda = params.lambda;
        sel.criterion = Criterion::SumDistance;
        sel.sigma = 1.0;
        sel.normalize_by_size = false;
        const auto result = greedy_select(ds, pool, sel).result;

        const auto gap = check_lemma1(ds, pool, result, params.lambda);
        ++report.trials_run;
        report.candidates_checked += gap.entries.size();
        report.violations += gap.failures;
        for (const auto& entry : gap.entries) {
            min_quality_slack = std::min(min_quality_slack, entry.quality_slack());
            min_distance_slack = std::min(min_distance_slack, entry.distance_slack());
            if (!entry.pass) {
                report.violation_details.push_back(describe_instance(
                    "verify_lemma1", t, seed, "selection gap", entry.quality_gain,
                    entry.quality_bound));
            }
        }
    }
    report.min_quality_slack = report.candidates_checked ? min_quality_slack : 0.0;
    report.min_distance_slack = report.candidates_checked ? min_distance_slack : 0.0;
    return report;
}

void SigmaSweepSuiteParams::validate() const {
    if (n == 0 || k == 0) throw InvalidArgument("sigma sweep suite: sizes must be >= 1");
    if (k > n) throw InvalidArgument("sigma sweep suite: k exceeds n");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidArgument("sigma sweep suite: lambda must be in [0, 1]");
    if (dim == 0) throw InvalidArgument("sigma sweep suite: dim must be >= 1");
}

SigmaSweepReport verify_sigma_sweep_suite(const SigmaSweepSuiteParams& params) {
    params.validate();
    SigmaSweepReport report;
    report.params = params;

    for (std::size_t t = 0; t < params.trials; ++t) {
        const std::uint64_t seed = derive_seed(params.seed, {fnv1a("sweep-trial"), t});
        const Dataset ds = trial_dataset(params.n, params.dim, seed);
        const auto pool = ds.all_ids();

        SigmaSweepTrial trial;
        trial.trial = t;
        trial.seed = seed;
        trial.f_opt =
            opt_brute_force(ds, pool, params.k, params.lambda, params.subset_cap).f_opt;

        SelectionParams sel;
        sel.k = params.k;
        sel.lambda = params.lambda;
        sel.criterion = Criterion::SumDistance;
        sel.normalize_by_size = false;

        sel.sigma = 0.5;
        trial.f_sigma_half = greedy_select(ds, pool, sel).result.objective;
        trial.f_sweep_best = greedy_select_sigma_sweep(ds, pool, sel).objective;

        const double floor = 0.5 * trial.f_opt;
        const double eps = 1e-9 * std::max(std::abs(floor), 1.0);
        trial.pass = trial.f_sigma_half >= floor - eps && trial.f_sweep_best >= floor - eps;
        if (!trial.pass) {
            ++report.violations;
            report.violation_details.push_back(describe_instance(
                "verify_sigma_sweep", t, seed, "half-approximation", floor,
                std::min(trial.f_sigma_half, trial.f_sweep_best)));
        }
        report.trials.push_back(trial);
    }
    return report;
}

}  // namespace muss
