#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "muss/types.hpp"

namespace muss {

enum class QualityModel {
    Uniform,     // qualities i.i.d. uniform in (0, 1]
    BlobBiased,  // per-blob quality means differ
};

QualityModel quality_model_from_string(const std::string& s);
std::string to_string(QualityModel m);

/// Recipe for a synthetic Gaussian-mixture dataset.
struct SyntheticSpec {
    std::size_t n = 100;
    std::size_t dim = 2;
    std::size_t blobs = 1;
    double blob_spread = 1.0;      // within-blob stddev
    double blob_separation = 10.0; // scale of blob centers
    QualityModel quality_model = QualityModel::Uniform;
    double relevant_fraction = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Deterministic synthetic data. Blob centers are drawn from
/// N(0, separation^2 I); item i belongs to blob i % blobs, with its
/// embedding at center + spread * N(0, I). Qualities land in (0, 1].
/// When relevant_fraction > 0, the round(f*n) items ranked highest by a
/// noisy copy of their quality get label = 1, so precision rewards
/// quality-aware selection without being a pure quality ranking.
Dataset generate(const SyntheticSpec& spec);

/// Fraction of selected items carrying label = 1. Requires labels.
double precision_at_k(const Dataset& ds, const SelectionResult& result);

struct BenchGrids {
    std::vector<double> lambda = {0.5};
    std::vector<double> lambda_c = {0.5};
    std::vector<std::size_t> l = {10};
    std::vector<std::size_t> m = {5};
    std::vector<std::size_t> k_within = {10};
};

/// One benchmark run (a method at one grid cell, one repeat).
/// wall_time_ms is the selection time; clustering for muss-family methods
/// is refit per run (it is the run's randomness) but reported only as the
/// "clustering" stage, since models are precomputable.
struct BenchSample {
    double precision = 0.0;  // NaN when the dataset has no labels
    double objective_mean_scaled = 0.0;
    double quality_mean = 0.0;    // Q / k
    double diversity_mean = 0.0;  // D / (k (k-1))
    double wall_time_ms = 0.0;
    std::vector<StageTime> stage_times;
    bool failed = false;
    std::string error;
};

/// A method x grid cell, aggregated over repeats.
struct BenchRow {
    std::string method;
    double lambda = 0.0;
    double lambda_c = 0.0;
    std::size_t l = 0;
    std::size_t m = 0;
    std::size_t k_within = 0;
    std::size_t k = 0;
    std::vector<BenchSample> samples;

    std::size_t failed_runs() const;
    double mean_precision() const;
    double stderr_precision() const;  // NaN with fewer than 2 repeats
    double mean_objective() const;
    double stderr_objective() const;
    double mean_quality() const;
    double mean_diversity() const;
    double mean_time_ms() const;
    double median_time_ms() const;
    double stderr_time_ms() const;
    double mean_stage_ms(const std::string& name) const;
};

struct BenchReport {
    std::size_t k = 0;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    std::vector<BenchRow> rows;
};

/// Runs each method over the grid cells it responds to, `repeats` times
/// each plus one discarded warm-up, with per-run seeds derived from
/// (master seed, method name, cell parameters, repeat index) so adding or
/// reordering methods never shifts another method's seeds. Cells run
/// sequentially; failures mark the sample and the harness continues.
/// Methods: random, topk, cluster-reps, mmr, mmr-sweep, muss, muss-prime,
/// dgds, rand-a, rand-b.
BenchReport run_benchmark(const Dataset& ds, const std::vector<std::string>& methods,
                          const BenchGrids& grids, std::size_t k, std::size_t repeats,
                          std::uint64_t seed, std::size_t workers = 1);

}  // namespace muss
