#pragma once

#include <cstdint>
#include <vector>

#include "muss/types.hpp"

namespace muss {

/// Result of a Lloyd fit over the combined (embedding, quality) space.
struct ClusterModel {
    std::size_t l = 0;
    std::size_t dim = 0;
    std::vector<double> centroids;            // l x dim, row-major
    std::vector<double> quality_centers;      // l
    std::vector<std::uint32_t> assignments;   // n, values in [0, l)
    double wcss = 0.0;                        // combined objective at convergence
    std::size_t iterations_run = 0;
    double quality_weight = 0.0;              // provenance
    std::uint64_t seed = 0;                   // provenance

    std::span<const double> centroid(std::size_t j) const {
        return {centroids.data() + j * dim, dim};
    }
};

struct KmeansOptions {
    std::size_t max_iters = 100;
    double tol = 1e-6;        // relative WCSS improvement that counts as converged
    std::size_t workers = 1;  // assignment step parallelism; results identical for any value
};

/// Lloyd's algorithm with k-means++ seeding over the combined space
/// (embedding coordinates plus the quality scaled by sqrt(quality_weight)).
/// Assignment minimizes ||x_i - mu_j||^2 + quality_weight * (q_i - phi_j)^2;
/// updates are per-cluster means of embeddings and of qualities.
/// quality_weight = 0 is exactly feature-space k-means. Empty clusters are
/// repaired by promoting the point farthest from its centroid to a
/// singleton. The combined objective is checked to be non-increasing on
/// every iteration. Deterministic and bit-identical for a fixed seed.
ClusterModel kmeans_fit(const Dataset& ds, std::size_t l, double quality_weight,
                        std::uint64_t seed, const KmeansOptions& options = {});

/// Recomputes the combined objective from stored centroids/assignments.
double compute_wcss(const Dataset& ds, const ClusterModel& model);

struct ClusterSummary {
    std::uint32_t cluster_id = 0;
    std::vector<double> centroid;
    double median_quality = 0.0;  // even counts: mean of the two middle values
    double radius = 0.0;          // max member-to-centroid embedding distance
    std::vector<ItemId> member_ids;
    std::size_t size = 0;
};

/// One summary per non-empty cluster, ascending by cluster id.
std::vector<ClusterSummary> summarize_clusters(const Dataset& ds, const ClusterModel& model);

/// Largest radius over all summaries; the r of the clustered selection bound.
double max_radius(const std::vector<ClusterSummary>& summaries);

/// Uniformly random balanced partition of 0..n-1 into l parts (sizes differ
/// by at most one), deterministic per seed. Parts are sorted ascending.
std::vector<std::vector<ItemId>> random_partition(const Dataset& ds, std::size_t l,
                                                  std::uint64_t seed);

}  // namespace muss
