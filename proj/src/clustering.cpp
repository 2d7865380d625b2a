#include "muss/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "muss/error.hpp"
#include "muss/objective.hpp"
#include "muss/rng.hpp"

namespace muss {

namespace {

// Squared cost of point i against centroid j in the combined space.
double point_cost(const Dataset& ds, const ClusterModel& model, std::size_t i, std::size_t j) {
    const double* centroid = model.centroids.data() + j * model.dim;
    const double* x = ds.embeddings_flat().data() + i * model.dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < model.dim; ++c) {
        const double diff = x[c] - centroid[c];
        acc += diff * diff;
    }
    const double dq = ds.quality(static_cast<ItemId>(i)) - model.quality_centers[j];
    return acc + model.quality_weight * dq * dq;
}

// k-means++ seeding over the combined space.
void seed_centroids(const Dataset& ds, ClusterModel& model, Rng& rng) {
    const std::size_t n = ds.size();
    const std::size_t l = model.l;

    std::vector<double> min_cost(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> chosen;
    chosen.reserve(l);

    std::size_t first = static_cast<std::size_t>(rng.next_below(n));
    chosen.push_back(first);

    const auto copy_center = [&](std::size_t slot, std::size_t point) {
        const double* x = ds.embeddings_flat().data() + point * model.dim;
        std::copy(x, x + model.dim,
                  model.centroids.begin() + static_cast<std::ptrdiff_t>(slot * model.dim));
        model.quality_centers[slot] = ds.quality(static_cast<ItemId>(point));
    };
    copy_center(0, first);

    for (std::size_t c = 1; c < l; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cost = point_cost(ds, model, i, c - 1);
            if (cost < min_cost[i]) min_cost[i] = cost;
            total += min_cost[i];
        }
        std::size_t next;
        if (total > 0.0) {
            // Draw proportionally to the squared distance to the nearest
            // chosen center; already-chosen points carry zero weight.
            double target = rng.next_double() * total;
            next = n - 1;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += min_cost[i];
                if (acc > target) {
                    next = i;
                    break;
                }
            }
        } else {
            // All remaining mass is zero (duplicate points); fall back to a
            // uniform draw over unchosen indices.
            std::vector<std::size_t> unchosen;
            std::vector<char> is_chosen(n, 0);
            for (std::size_t idx : chosen) is_chosen[idx] = 1;
            for (std::size_t i = 0; i < n; ++i)
                if (!is_chosen[i]) unchosen.push_back(i);
            next = unchosen[static_cast<std::size_t>(rng.next_below(unchosen.size()))];
        }
        chosen.push_back(next);
        copy_center(c, next);
    }
}

void parallel_for(std::size_t n, std::size_t workers, const auto& body) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : threads) t.join();
}

// Assign every point to its cheapest centroid (ties: smallest index).
void assign_points(const Dataset& ds, ClusterModel& model, std::size_t workers) {
    parallel_for(ds.size(), workers, [&](std::size_t i) {
        std::size_t best = 0;
        double best_cost = point_cost(ds, model, i, 0);
        for (std::size_t j = 1; j < model.l; ++j) {
            const double cost = point_cost(ds, model, i, j);
            if (cost < best_cost) {
                best_cost = cost;
                best = j;
            }
        }
        model.assignments[i] = static_cast<std::uint32_t>(best);
    });
}

// Promote the point farthest from its centroid (among clusters that can
// spare a member) to a singleton replacing each empty cluster.
void repair_empty_clusters(const Dataset& ds, ClusterModel& model) {
    const std::size_t n = ds.size();
    std::vector<std::size_t> counts(model.l, 0);
    for (std::uint32_t a : model.assignments) ++counts[a];

    for (std::size_t j = 0; j < model.l; ++j) {
        if (counts[j] != 0) continue;
        std::size_t worst = n;
        double worst_cost = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[model.assignments[i]] <= 1) continue;
            const double cost = point_cost(ds, model, i, model.assignments[i]);
            if (cost > worst_cost) {
                worst_cost = cost;
                worst = i;
            }
        }
        if (worst == n) throw InvalidArgument("kmeans_fit: cannot repair empty cluster");
        --counts[model.assignments[worst]];
        model.assignments[worst] = static_cast<std::uint32_t>(j);
        counts[j] = 1;
        const double* x = ds.embeddings_flat().data() + worst * model.dim;
        std::copy(x, x + model.dim,
                  model.centroids.begin() + static_cast<std::ptrdiff_t>(j * model.dim));
        model.quality_centers[j] = ds.quality(static_cast<ItemId>(worst));
    }
}

// Centroids and quality centers become member means. Summation runs in
// ascending id order so results are bit-stable across worker counts.
void update_centroids(const Dataset& ds, ClusterModel& model) {
    std::fill(model.centroids.begin(), model.centroids.end(), 0.0);
    std::fill(model.quality_centers.begin(), model.quality_centers.end(), 0.0);
    std::vector<std::size_t> counts(model.l, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::size_t j = model.assignments[i];
        const double* x = ds.embeddings_flat().data() + i * model.dim;
        double* centroid = model.centroids.data() + j * model.dim;
        for (std::size_t c = 0; c < model.dim; ++c) centroid[c] += x[c];
        model.quality_centers[j] += ds.quality(static_cast<ItemId>(i));
        ++counts[j];
    }
    for (std::size_t j = 0; j < model.l; ++j) {
        if (counts[j] == 0) continue;  // repaired before update; keep safe anyway
        const double inv = 1.0 / static_cast<double>(counts[j]);
        double* centroid = model.centroids.data() + j * model.dim;
        for (std::size_t c = 0; c < model.dim; ++c) centroid[c] *= inv;
        model.quality_centers[j] *= inv;
    }
}

}  // namespace

double compute_wcss(const Dataset& ds, const ClusterModel& model) {
    double total = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        total += point_cost(ds, model, i, model.assignments[i]);
    }
    return total;
}

ClusterModel kmeans_fit(const Dataset& ds, std::size_t l, double quality_weight,
                        std::uint64_t seed, const KmeansOptions& options) {
    if (l == 0) throw InvalidArgument("kmeans_fit: l must be >= 1");
    if (l > ds.size())
        throw InvalidArgument("kmeans_fit: l = " + std::to_string(l) + " exceeds n = " +
                              std::to_string(ds.size()));
    if (quality_weight < 0.0) throw InvalidArgument("kmeans_fit: quality_weight must be >= 0");
    if (!(options.tol > 0.0)) throw InvalidArgument("kmeans_fit: tol must be > 0");

    ClusterModel model;
    model.l = l;
    model.dim = ds.dim();
    model.centroids.assign(l * ds.dim(), 0.0);
    model.quality_centers.assign(l, 0.0);
    model.assignments.assign(ds.size(), 0);
    model.quality_weight = quality_weight;
    model.seed = seed;

    Rng rng(derive_seed(seed, {fnv1a("kmeans")}));
    seed_centroids(ds, model, rng);

    double prev_wcss = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
        assign_points(ds, model, options.workers);
        repair_empty_clusters(ds, model);
        update_centroids(ds, model);
        const double wcss = compute_wcss(ds, model);
        model.iterations_run = iter + 1;

        if (std::isfinite(prev_wcss) && wcss > prev_wcss * (1.0 + 1e-9) + 1e-12) {
            throw Error("kmeans_fit: objective increased from " + std::to_string(prev_wcss) +
                        " to " + std::to_string(wcss) + " at iteration " +
                        std::to_string(model.iterations_run));
        }
        model.wcss = wcss;
        if (std::isfinite(prev_wcss)) {
            const double rel = prev_wcss > 0.0 ? (prev_wcss - wcss) / prev_wcss : 0.0;
            if (rel < options.tol) break;
        } else if (wcss == 0.0) {
            break;
        }
        prev_wcss = wcss;
    }
    return model;
}

std::vector<ClusterSummary> summarize_clusters(const Dataset& ds, const ClusterModel& model) {
    if (model.assignments.size() != ds.size())
        throw InvalidArgument("summarize_clusters: model was not trained on this dataset");
    if (model.dim != ds.dim())
        throw InvalidArgument("summarize_clusters: model dimension mismatch");

    std::vector<std::vector<ItemId>> members(model.l);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        members[model.assignments[i]].push_back(static_cast<ItemId>(i));
    }

    std::vector<ClusterSummary> summaries;
    summaries.reserve(model.l);
    for (std::size_t j = 0; j < model.l; ++j) {
        if (members[j].empty()) continue;
        ClusterSummary s;
        s.cluster_id = static_cast<std::uint32_t>(j);
        auto centroid = model.centroid(j);
        s.centroid.assign(centroid.begin(), centroid.end());
        s.member_ids = std::move(members[j]);
        s.size = s.member_ids.size();

        std::vector<double> qualities;
        qualities.reserve(s.size);
        for (ItemId id : s.member_ids) {
            qualities.push_back(ds.quality(id));
            s.radius = std::max(s.radius, euclidean(ds.embedding(id), centroid));
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

double max_radius(const std::vector<ClusterSummary>& summaries) {
    double r = 0.0;
    for (const auto& s : summaries) r = std::max(r, s.radius);
    return r;
}

std::vector<std::vector<ItemId>> random_partition(const Dataset& ds, std::size_t l,
                                                  std::uint64_t seed) {
    const std::size_t n = ds.size();
    if (l == 0) throw InvalidArgument("random_partition: l must be >= 1");
    if (l > n)
        throw InvalidArgument("random_partition: l = " + std::to_string(l) + " exceeds n = " +
                              std::to_string(n));

    std::vector<ItemId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<ItemId>(i);
    Rng rng(derive_seed(seed, {fnv1a("partition")}));
    rng.shuffle(ids);

    // First (n mod l) parts take the extra element.
    std::vector<std::vector<ItemId>> parts(l);
    const std::size_t base = n / l;
    const std::size_t extra = n % l;
    std::size_t offset = 0;
    for (std::size_t p = 0; p < l; ++p) {
        const std::size_t size = base + (p < extra ? 1 : 0);
        const auto first = ids.begin() + static_cast<std::ptrdiff_t>(offset);
        parts[p].assign(first, first + static_cast<std::ptrdiff_t>(size));
        std::sort(parts[p].begin(), parts[p].end());
        offset += size;
    }
    return parts;
}

}  // namespace muss
