#include "muss/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "muss/error.hpp"
#include "muss/objective.hpp"
#include "muss/oracle.hpp"
#include "muss/rng.hpp"
#include "muss/selectors.hpp"

namespace muss {

QualityModel quality_model_from_string(const std::string& s) {
    if (s == "uniform") return QualityModel::Uniform;
    if (s == "blob_biased" || s == "blob-biased") return QualityModel::BlobBiased;
    throw InvalidArgument("unknown quality model '" + s + "'");
}

std::string to_string(QualityModel m) {
    return m == QualityModel::Uniform ? "uniform" : "blob_biased";
}

void SyntheticSpec::validate() const {
    if (blobs == 0) throw InvalidArgument("synthetic spec: blobs must be >= 1");
    if (n < blobs) throw InvalidArgument("synthetic spec: n must be >= blobs");
    if (dim == 0) throw InvalidArgument("synthetic spec: dim must be >= 1");
    if (!(blob_spread > 0.0)) throw InvalidArgument("synthetic spec: blob_spread must be > 0");
    if (!(blob_separation >= 0.0))
        throw InvalidArgument("synthetic spec: blob_separation must be >= 0");
    if (!(relevant_fraction >= 0.0 && relevant_fraction <= 1.0))
        throw InvalidArgument("synthetic spec: relevant_fraction must be in [0, 1]");
}

Dataset generate(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, {fnv1a("synthetic")}));

    std::vector<double> centers(spec.blobs * spec.dim);
    for (double& v : centers) v = spec.blob_separation * rng.next_gaussian();

    // Per-blob base quality for the biased model, spread across (0, 1).
    std::vector<double> blob_quality(spec.blobs);
    for (std::size_t b = 0; b < spec.blobs; ++b) {
        blob_quality[b] = static_cast<double>(b + 1) / static_cast<double>(spec.blobs + 1);
    }

    std::vector<double> embeddings(spec.n * spec.dim);
    std::vector<double> qualities(spec.n);
    constexpr double quality_floor = 1e-6;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t blob = i % spec.blobs;  // round-robin keeps every blob populated
        const double* center = centers.data() + blob * spec.dim;
        double* x = embeddings.data() + i * spec.dim;
        for (std::size_t c = 0; c < spec.dim; ++c) {
            x[c] = center[c] + spec.blob_spread * rng.next_gaussian();
        }
        double q;
        if (spec.quality_model == QualityModel::Uniform) {
            q = 1.0 - rng.next_double();  // (0, 1]
        } else {
            q = blob_quality[blob] + 0.15 * rng.next_gaussian();
        }
        qualities[i] = std::clamp(q, quality_floor, 1.0);
    }

    std::vector<std::uint8_t> labels;
    if (spec.relevant_fraction > 0.0) {
        // Rank by a noisy copy of the quality; the top fraction is relevant.
        const std::size_t relevant =
            static_cast<std::size_t>(std::llround(spec.relevant_fraction * static_cast<double>(spec.n)));
        std::vector<std::pair<double, std::size_t>> noisy(spec.n);
        for (std::size_t i = 0; i < spec.n; ++i) {
            noisy[i] = {qualities[i] + 0.05 * rng.next_gaussian(), i};
        }
        std::sort(noisy.begin(), noisy.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        labels.assign(spec.n, 0);
        for (std::size_t i = 0; i < relevant && i < spec.n; ++i) labels[noisy[i].second] = 1;
    }

    return Dataset(spec.dim, std::move(embeddings), std::move(qualities), std::move(labels));
}

double precision_at_k(const Dataset& ds, const SelectionResult& result) {
    if (!ds.has_labels()) throw InvalidArgument("precision_at_k: dataset has no labels");
    if (result.selected.empty()) throw InvalidArgument("precision_at_k: empty selection");
    std::size_t hits = 0;
    for (ItemId id : result.selected) {
        if (ds.label(id)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(result.selected.size());
}

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double mean = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return sd / std::sqrt(static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::vector<double> collect(const std::vector<BenchSample>& samples, const auto& get) {
    std::vector<double> out;
    for (const auto& s : samples) {
        if (!s.failed) out.push_back(get(s));
    }
    return out;
}

// Which grid dimensions a method responds to; used to collapse the grid so
// e.g. plain greedy does not rerun once per lambda_c value.
struct MethodShape {
    bool uses_lambda = false;
    bool uses_lambda_c = false;
    bool uses_l = false;
    bool uses_m = false;
    bool uses_k_within = false;
};

MethodShape method_shape(const std::string& method) {
    MethodShape s;
    if (method == "random" || method == "topk" || method == "cluster-reps") return s;
    s.uses_lambda = true;
    if (method == "mmr" || method == "mmr-sweep") return s;
    s.uses_l = true;
    s.uses_k_within = true;
    if (method == "dgds") return s;
    if (method == "muss" || method == "muss-prime" || method == "rand-a" || method == "rand-b") {
        s.uses_lambda_c = true;
        s.uses_m = true;
        return s;
    }
    throw InvalidArgument("unknown benchmark method '" + method + "'");
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& method, const BenchRow& row,
                        std::size_t repeat) {
    // Seed depends only on the method name, the cell values it uses, and
    // the repeat index, never on grid position or method order.
    const auto bits = [](double v) {
        std::uint64_t u;
        static_assert(sizeof(u) == sizeof(v));
        std::memcpy(&u, &v, sizeof(u));
        return u;
    };
    const MethodShape shape = method_shape(method);
    return derive_seed(master, {fnv1a(method.c_str()),
                                shape.uses_lambda ? bits(row.lambda) : 0,
                                shape.uses_lambda_c ? bits(row.lambda_c) : 0,
                                shape.uses_l ? row.l : 0,
                                shape.uses_m ? row.m : 0,
                                shape.uses_k_within ? row.k_within : 0,
                                repeat});
}

BenchSample run_once(const Dataset& ds, const std::string& method, const BenchRow& row,
                     std::uint64_t seed, std::size_t workers) {
    BenchSample sample;
    const auto start = std::chrono::steady_clock::now();
    try {
        SelectionResult result;
        if (method == "random") {
            result = baseline_select(ds, BaselineKind::Random, row.k, seed);
        } else if (method == "topk") {
            result = baseline_select(ds, BaselineKind::TopkQuality, row.k, seed);
        } else if (method == "cluster-reps") {
            result = baseline_select(ds, BaselineKind::ClusterReps, row.k, seed);
        } else if (method == "mmr" || method == "mmr-sweep") {
            SelectionParams params;
            params.k = row.k;
            params.lambda = row.lambda;
            if (method == "mmr") {
                result = greedy_select(ds, ds.all_ids(), params).result;
            } else {
                result = greedy_select_sigma_sweep(ds, ds.all_ids(), params);
            }
        } else if (method == "dgds") {
            DgdsParams params;
            params.k = row.k;
            params.k_within = row.k_within;
            params.l = row.l;
            params.lambda = row.lambda;
            params.workers = workers;
            params.seed = seed;
            result = dgds_select(ds, params);
        } else {
            MussParams params;
            params.k = row.k;
            params.k_within = row.k_within;
            params.l = row.l;
            params.m = row.m;
            params.lambda = row.lambda;
            params.lambda_c = row.lambda_c;
            params.sigma_final = method == "muss-prime" ? 0.5 : 1.0;
            params.workers = workers;
            params.seed = seed;
            if (method == "rand-b") {
                result = ablation_rand_b(ds, params);
            } else {
                // Clustering is refit per run (it is the run's randomness)
                // but counts as preprocessing: it shows up as a stage, not
                // in the selection wall time, mirroring the protocol where
                // models are built once ahead of selection.
                const auto cluster_start = std::chrono::steady_clock::now();
                const auto model = kmeans_fit(ds, params.l, 0.0, seed, {.workers = workers});
                const double cluster_ms = std::chrono::duration<double, std::milli>(
                                              std::chrono::steady_clock::now() - cluster_start)
                                              .count();
                result = method == "rand-a" ? ablation_rand_a(ds, model, params)
                                            : muss_select(ds, model, params);
                result.stage_times.insert(result.stage_times.begin(), {"clustering", cluster_ms});
            }
        }

        // Rescale the reported terms to the row's lambda so every row is
        // comparable even for methods without a trade-off knob.
        const auto breakdown = objective(ds, result.selected, row.lambda);
        sample.objective_mean_scaled = mean_scaled_objective(
            breakdown.quality, breakdown.diversity, result.selected.size(), row.lambda);
        const auto k = static_cast<double>(result.selected.size());
        sample.quality_mean = breakdown.quality / k;
        sample.diversity_mean =
            result.selected.size() < 2 ? 0.0 : breakdown.diversity / (k * (k - 1.0));
        sample.precision = ds.has_labels() ? precision_at_k(ds, result)
                                           : std::numeric_limits<double>::quiet_NaN();
        sample.stage_times = result.stage_times;
        sample.wall_time_ms = result.wall_time_ms;
    } catch (const std::exception& e) {
        sample.failed = true;
        sample.error = e.what();
        sample.wall_time_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
    }
    return sample;
}

}  // namespace

std::size_t BenchRow::failed_runs() const {
    std::size_t failed = 0;
    for (const auto& s : samples) {
        if (s.failed) ++failed;
    }
    return failed;
}

double BenchRow::mean_precision() const {
    return mean_of(collect(samples, [](const BenchSample& s) { return s.precision; }));
}
double BenchRow::stderr_precision() const {
    return stderr_of(collect(samples, [](const BenchSample& s) { return s.precision; }));
}
double BenchRow::mean_objective() const {
    return mean_of(collect(samples, [](const BenchSample& s) { return s.objective_mean_scaled; }));
}
double BenchRow::stderr_objective() const {
    return stderr_of(collect(samples, [](const BenchSample& s) { return s.objective_mean_scaled; }));
}
double BenchRow::mean_quality() const {
    return mean_of(collect(samples, [](const BenchSample& s) { return s.quality_mean; }));
}
double BenchRow::mean_diversity() const {
    return mean_of(collect(samples, [](const BenchSample& s) { return s.diversity_mean; }));
}
double BenchRow::mean_time_ms() const {
    return mean_of(collect(samples, [](const BenchSample& s) { return s.wall_time_ms; }));
}
double BenchRow::median_time_ms() const {
    return median_of(collect(samples, [](const BenchSample& s) { return s.wall_time_ms; }));
}
double BenchRow::stderr_time_ms() const {
    return stderr_of(collect(samples, [](const BenchSample& s) { return s.wall_time_ms; }));
}
double BenchRow::mean_stage_ms(const std::string& name) const {
    std::vector<double> values;
    for (const auto& s : samples) {
        if (s.failed) continue;
        for (const auto& st : s.stage_times) {
            if (st.name == name) values.push_back(st.ms);
        }
    }
    return values.empty() ? 0.0 : mean_of(values);
}

BenchReport run_benchmark(const Dataset& ds, const std::vector<std::string>& methods,
                          const BenchGrids& grids, std::size_t k, std::size_t repeats,
                          std::uint64_t seed, std::size_t workers) {
    if (methods.empty()) throw InvalidArgument("run_benchmark: no methods given");
    if (k == 0) throw InvalidArgument("run_benchmark: k must be >= 1");
    if (repeats == 0) throw InvalidArgument("run_benchmark: repeats must be >= 1");
    if (grids.lambda.empty() || grids.lambda_c.empty() || grids.l.empty() || grids.m.empty() ||
        grids.k_within.empty())
        throw InvalidArgument("run_benchmark: grids must be non-empty");

    BenchReport report;
    report.k = k;
    report.repeats = repeats;
    report.seed = seed;

    for (const std::string& method : methods) {
        const MethodShape shape = method_shape(method);
        const auto one_or = [](bool used, const auto& grid, auto fallback) {
            using T = std::decay_t<decltype(fallback)>;
            return used ? std::vector<T>(grid.begin(), grid.end()) : std::vector<T>{fallback};
        };
        const auto lambdas = one_or(shape.uses_lambda, grids.lambda, 0.5);
        const auto lambda_cs = one_or(shape.uses_lambda_c, grids.lambda_c, 0.5);
        const auto ls = one_or(shape.uses_l, grids.l, std::size_t{0});
        const auto ms = one_or(shape.uses_m, grids.m, std::size_t{0});
        const auto kws = one_or(shape.uses_k_within, grids.k_within, std::size_t{0});

        for (double lambda : lambdas) {
            for (double lambda_c : lambda_cs) {
                for (std::size_t l : ls) {
                    for (std::size_t m : ms) {
                        for (std::size_t kw : kws) {
                            BenchRow row;
                            row.method = method;
                            row.lambda = lambda;
                            row.lambda_c = lambda_c;
                            row.l = l;
                            row.m = m;
                            row.k_within = kw;
                            row.k = k;

                            // Warm-up with the first repeat's seed, discarded.
                            run_once(ds, method, row, cell_seed(seed, method, row, 0), workers);
                            for (std::size_t r = 0; r < repeats; ++r) {
                                row.samples.push_back(run_once(
                                    ds, method, row, cell_seed(seed, method, row, r), workers));
                            }
                            report.rows.push_back(std::move(row));
                        }
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace muss
