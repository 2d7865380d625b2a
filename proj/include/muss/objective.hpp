#pragma once

#include <span>

#include "muss/types.hpp"

namespace muss {

/// Euclidean distance between two raw embedding views.
double euclidean(std::span<const double> a, std::span<const double> b);

/// Euclidean distance between two items; dimensions must match.
double distance(const Item& a, const Item& b);

/// Euclidean distance between two items of a dataset.
double distance(const Dataset& ds, ItemId a, ItemId b);

/// Q(S): sum of item qualities. Q(empty) = 0.
double quality_sum(const Dataset& ds, std::span<const ItemId> selection);

/// D(S): sum of pairwise distances over ordered pairs, i.e. every
/// unordered pair counted twice. 0 for |S| <= 1.
double diversity_sum(const Dataset& ds, std::span<const ItemId> selection);

struct ObjectiveBreakdown {
    double objective = 0.0;
    double quality = 0.0;
    double diversity = 0.0;
};

/// F(S) = lambda * Q(S) + (1 - lambda) * D(S), with the raw-sum terms.
ObjectiveBreakdown objective(const Dataset& ds, std::span<const ItemId> selection, double lambda);

/// Reporting variant: lambda * Q/k + (1 - lambda) * D/(k(k-1)), which keeps
/// both terms on a per-item / per-pair scale. The diversity term is 0 for
/// k < 2. Never used by bound checks.
double mean_scaled_objective(double quality, double diversity, std::size_t k, double lambda);

/// Greedy gain of adding t to selection S (sum-distance criterion):
/// lambda * q(t) + (1 - lambda) * G where G is the distance sum over S,
/// divided by |S| when normalize_by_size is set (G = 0 for empty S).
/// Throws if t is already selected.
double marginal_gain(const Dataset& ds, std::span<const ItemId> selection, ItemId t,
                     double lambda, bool normalize_by_size);

/// Shared validation: every id in range, no duplicates.
void validate_ids(const Dataset& ds, std::span<const ItemId> ids, const char* what);

}  // namespace muss
