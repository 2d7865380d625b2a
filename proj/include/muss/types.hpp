#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace muss {

using ItemId = std::uint32_t;

enum class Criterion {
    SumDistance,  // gain uses the sum of distances to the selection
    MinDistance,  // gain uses the minimum distance to the selection
};

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

/// A single item: an embedding plus a non-negative quality score.
struct Item {
    ItemId id = 0;
    std::vector<double> embedding;
    double quality = 0.0;
    std::optional<bool> label;
};

/// Immutable indexed collection of items with a shared embedding dimension.
/// Ids are dense 0..n-1 and equal the storage index. Embeddings are kept in
/// one contiguous row-major buffer; all accessors hand out views.
class Dataset {
public:
    /// Column-wise construction. `embeddings` is n*dim row-major,
    /// `labels` is either empty or one 0/1 byte per item.
    Dataset(std::size_t dim,
            std::vector<double> embeddings,
            std::vector<double> qualities,
            std::vector<std::uint8_t> labels = {});

    static Dataset from_items(std::size_t dim, const std::vector<Item>& items);

    std::size_t size() const noexcept { return qualities_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool has_labels() const noexcept { return !labels_.empty(); }

    std::span<const double> embedding(ItemId id) const {
        return {embeddings_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }
    double quality(ItemId id) const { return qualities_[id]; }
    bool label(ItemId id) const;

    std::span<const double> embeddings_flat() const noexcept { return embeddings_; }
    std::span<const double> qualities() const noexcept { return qualities_; }
    std::span<const std::uint8_t> labels() const noexcept { return labels_; }

    Item item(ItemId id) const;

    /// All ids 0..n-1 in order; the default selection pool.
    std::vector<ItemId> all_ids() const;

    /// Copy with every embedding scaled to unit L2 norm (zero vectors are
    /// kept as-is). An ingest-time stand-in for angular similarity that
    /// leaves the metric a metric.
    Dataset l2_normalized() const;

private:
    std::size_t dim_;
    std::vector<double> embeddings_;
    std::vector<double> qualities_;
    std::vector<std::uint8_t> labels_;
};

/// Knobs for one greedy selection run.
struct SelectionParams {
    std::size_t k = 1;
    double lambda = 0.5;
    Criterion criterion = Criterion::SumDistance;
    double sigma = 1.0;            // quality-term scaler, selection only
    bool normalize_by_size = true; // divide summed distances by |S|

    void validate() const;  // throws InvalidArgument
};

/// Flat provenance record attached to every result; serialized verbatim
/// into result JSON so runs are reproducible from their output alone.
struct ParamsEcho {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::uint64_t value);
    const std::string* find(const std::string& key) const;
};

struct StageTime {
    std::string name;
    double ms = 0.0;
};

struct SelectionResult {
    std::vector<ItemId> selected;       // in pick order
    double objective = 0.0;             // F(S), raw-sum convention
    double quality_term = 0.0;          // Q(S)
    double diversity_term = 0.0;        // D(S), ordered pairs
    double objective_mean_scaled = 0.0; // reporting convention, see objective.hpp
    double wall_time_ms = 0.0;
    ParamsEcho params_echo;
    std::vector<StageTime> stage_times; // empty for single-stage selectors
    std::vector<std::string> warnings;

    double stage_ms(const std::string& name) const;
};

}  // namespace muss
