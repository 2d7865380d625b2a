#pragma once

#include <cstdint>
#include <vector>

#include "muss/clustering.hpp"
#include "muss/greedy.hpp"
#include "muss/types.hpp"

namespace muss {

/// Parameters of the multilevel pipeline.
struct MussParams {
    std::size_t k = 1;         // final selection size
    std::size_t k_within = 1;  // per-cluster selection size (k')
    std::size_t l = 1;         // number of clusters (used when fitting in-line)
    std::size_t m = 1;         // number of clusters to select
    double lambda = 0.5;       // item-level trade-off
    double lambda_c = 0.5;     // cluster-level trade-off
    double sigma_final = 1.0;  // 0.5 gives the bound-checked variant
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    Criterion criterion = Criterion::SumDistance;  // item-level stages
    bool normalize_by_size = true;                 // item-level stages
    bool sigma_sweep_final = false;  // final stage picks the best of sigma in {0, 0.5, 1}

    void validate() const;
};

/// Multilevel selection: greedy over cluster summaries (m, lambda_c,
/// always unnormalized sum-distance), greedy within each selected cluster
/// (k_within, lambda) across up to `workers` threads, union with the
/// global top-k quality items, final greedy (k, lambda, sigma_final).
/// Deterministic for any worker count; stage wall times are attached to
/// the result. m > l is clamped with a warning; clusters smaller than
/// k_within contribute all their members.
SelectionResult muss_select(const Dataset& ds, const ClusterModel& model,
                            const MussParams& params);

struct DgdsParams {
    std::size_t k = 1;
    std::size_t k_within = 1;
    std::size_t l = 1;  // number of random partitions
    double lambda = 0.5;
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    Criterion criterion = Criterion::SumDistance;
    bool normalize_by_size = true;
    bool sigma_sweep_final = false;

    void validate() const;
};

/// Distributed baseline: random balanced partition, greedy per part,
/// final greedy over the union of part selections. No cluster pruning and
/// no top-k quality augmentation.
SelectionResult dgds_select(const Dataset& ds, const DgdsParams& params);

/// Multilevel pipeline with the cluster-level greedy replaced by a
/// seeded uniform choice of m clusters.
SelectionResult ablation_rand_a(const Dataset& ds, const ClusterModel& model,
                                const MussParams& params);

/// Multilevel pipeline over a random balanced partition instead of a
/// fitted clustering; partition centroids are member embedding means and
/// partition quality is the member median, as for real clusters.
SelectionResult ablation_rand_b(const Dataset& ds, const MussParams& params);

enum class BaselineKind {
    Random,       // uniform sample without replacement
    TopkQuality,  // k highest qualities, ties to the smaller id
    ClusterReps,  // fit l=k clusters, take each cluster's best-quality member
};

BaselineKind baseline_kind_from_string(const std::string& s);

SelectionResult baseline_select(const Dataset& ds, BaselineKind kind, std::size_t k,
                                std::uint64_t seed);

/// The k highest-quality ids (quality descending, ties ascending id).
std::vector<ItemId> top_k_quality(const Dataset& ds, std::size_t k);

/// Constants of the clustered approximation bound
///   F(multilevel') >= F_opt / alpha - r * beta / alpha
/// with alpha/2 = 5 * (k(k-1))/(m(m-1)) * (1-lambda)/(1-lambda_c) + 2 and
/// beta = k(k-1) * (4(1-lambda) + 5(1-lambda)/(1-lambda_c)).
struct Theorem5Bound {
    double alpha = 0.0;
    double beta = 0.0;
    double r = 0.0;

    /// Right-hand side of the bound for a given optimum value.
    double rhs(double f_opt) const { return f_opt / alpha - r * beta / alpha; }
};

/// Requires k > 1, m > 1, k >= m, 0 < lambda < 1, lambda_c < 1; violations
/// raise InvalidArgument naming the assumption. With k = m and
/// lambda = lambda_c, alpha is exactly 14.
Theorem5Bound compute_theorem5_bound(const MussParams& params, double r);

}  // namespace muss
