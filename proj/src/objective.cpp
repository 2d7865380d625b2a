#include "muss/objective.hpp"

#include <cmath>
#include <vector>

#include "muss/error.hpp"

namespace muss {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

double distance(const Item& a, const Item& b) {
    if (a.embedding.size() != b.embedding.size())
        throw InvalidArgument("distance: dimension mismatch (" +
                              std::to_string(a.embedding.size()) + " vs " +
                              std::to_string(b.embedding.size()) + ")");
    return euclidean(a.embedding, b.embedding);
}

double distance(const Dataset& ds, ItemId a, ItemId b) {
    return euclidean(ds.embedding(a), ds.embedding(b));
}

void validate_ids(const Dataset& ds, std::span<const ItemId> ids, const char* what) {
    std::vector<bool> seen(ds.size(), false);
    for (ItemId id : ids) {
        if (id >= ds.size())
            throw InvalidArgument(std::string(what) + ": id out of range: " + std::to_string(id));
        if (seen[id])
            throw InvalidArgument(std::string(what) + ": duplicate id: " + std::to_string(id));
        seen[id] = true;
    }
}

double quality_sum(const Dataset& ds, std::span<const ItemId> selection) {
    validate_ids(ds, selection, "quality_sum");
    double q = 0.0;
    for (ItemId id : selection) q += ds.quality(id);
    return q;
}

double diversity_sum(const Dataset& ds, std::span<const ItemId> selection) {
    validate_ids(ds, selection, "diversity_sum");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < selection.size(); ++i) {
        for (std::size_t j = i + 1; j < selection.size(); ++j) {
            acc += distance(ds, selection[i], selection[j]);
        }
    }
    return 2.0 * acc;  // ordered-pair convention
}

ObjectiveBreakdown objective(const Dataset& ds, std::span<const ItemId> selection, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidArgument("objective: lambda must be in [0, 1]");
    ObjectiveBreakdown out;
    out.quality = quality_sum(ds, selection);
    out.diversity = diversity_sum(ds, selection);
    out.objective = lambda * out.quality + (1.0 - lambda) * out.diversity;
    return out;
}

double mean_scaled_objective(double quality, double diversity, std::size_t k, double lambda) {
    if (k == 0) return 0.0;
    const double q_bar = quality / static_cast<double>(k);
    const double d_bar =
        k < 2 ? 0.0 : diversity / (static_cast<double>(k) * static_cast<double>(k - 1));
    return lambda * q_bar + (1.0 - lambda) * d_bar;
}

double marginal_gain(const Dataset& ds, std::span<const ItemId> selection, ItemId t,
                     double lambda, bool normalize_by_size) {
    validate_ids(ds, selection, "marginal_gain");
    if (t >= ds.size())
        throw InvalidArgument("marginal_gain: id out of range: " + std::to_string(t));
    for (ItemId id : selection) {
        if (id == t)
            throw InvalidArgument("marginal_gain: candidate " + std::to_string(t) +
                                  " is already selected");
    }
    double dist_sum = 0.0;
    for (ItemId id : selection) dist_sum += distance(ds, t, id);
    double g = dist_sum;
    if (normalize_by_size && !selection.empty()) g /= static_cast<double>(selection.size());
    return lambda * ds.quality(t) + (1.0 - lambda) * g;
}

}  // namespace muss
