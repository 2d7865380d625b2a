#include "muss/types.hpp"

#include <cmath>
#include <cstdio>

#include "muss/error.hpp"

namespace muss {

std::string to_string(Criterion c) {
    return c == Criterion::SumDistance ? "sum" : "min";
}

Criterion criterion_from_string(const std::string& s) {
    if (s == "sum") return Criterion::SumDistance;
    if (s == "min") return Criterion::MinDistance;
    throw InvalidArgument("unknown criterion '" + s + "' (expected 'sum' or 'min')");
}

Dataset::Dataset(std::size_t dim, std::vector<double> embeddings,
                 std::vector<double> qualities, std::vector<std::uint8_t> labels)
    : dim_(dim),
      embeddings_(std::move(embeddings)),
      qualities_(std::move(qualities)),
      labels_(std::move(labels)) {
    const std::size_t n = qualities_.size();
    if (dim_ == 0) throw InvalidArgument("dataset dimension must be positive");
    if (embeddings_.size() != n * dim_)
        throw InvalidArgument("embedding buffer size does not match n * dim");
    if (!labels_.empty() && labels_.size() != n)
        throw InvalidArgument("label buffer must be empty or one entry per item");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(qualities_[i]) || qualities_[i] < 0.0)
            throw InvalidArgument("quality of item " + std::to_string(i) +
                                  " must be finite and >= 0");
    }
    for (double v : embeddings_) {
        if (!std::isfinite(v)) throw InvalidArgument("embeddings must be finite");
    }
    for (std::uint8_t b : labels_) {
        if (b > 1) throw InvalidArgument("labels must be 0 or 1");
    }
}

Dataset Dataset::from_items(std::size_t dim, const std::vector<Item>& items) {
    std::vector<double> embeddings;
    embeddings.reserve(items.size() * dim);
    std::vector<double> qualities;
    qualities.reserve(items.size());
    std::vector<std::uint8_t> labels;
    std::size_t labeled = 0;
    for (const Item& it : items) {
        if (it.label) ++labeled;
    }
    if (labeled != 0 && labeled != items.size())
        throw InvalidArgument("either all items carry labels or none do");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        if (it.id != static_cast<ItemId>(i))
            throw InvalidArgument("item ids must be dense 0..n-1 in order (got " +
                                  std::to_string(it.id) + " at position " + std::to_string(i) + ")");
        if (it.embedding.size() != dim)
            throw InvalidArgument("item " + std::to_string(i) + " has dimension " +
                                  std::to_string(it.embedding.size()) + ", expected " +
                                  std::to_string(dim));
        embeddings.insert(embeddings.end(), it.embedding.begin(), it.embedding.end());
        qualities.push_back(it.quality);
        if (labeled) labels.push_back(*it.label ? 1 : 0);
    }
    return Dataset(dim, std::move(embeddings), std::move(qualities), std::move(labels));
}

bool Dataset::label(ItemId id) const {
    if (labels_.empty()) throw InvalidArgument("dataset carries no labels");
    return labels_[id] != 0;
}

Item Dataset::item(ItemId id) const {
    if (id >= size()) throw InvalidArgument("item id out of range: " + std::to_string(id));
    Item it;
    it.id = id;
    auto e = embedding(id);
    it.embedding.assign(e.begin(), e.end());
    it.quality = qualities_[id];
    if (has_labels()) it.label = labels_[id] != 0;
    return it;
}

std::vector<ItemId> Dataset::all_ids() const {
    std::vector<ItemId> ids(size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ItemId>(i);
    return ids;
}

Dataset Dataset::l2_normalized() const {
    std::vector<double> normalized(embeddings_);
    for (std::size_t i = 0; i < size(); ++i) {
        double* row = normalized.data() + i * dim_;
        double norm_sq = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) norm_sq += row[c] * row[c];
        if (norm_sq == 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t c = 0; c < dim_; ++c) row[c] *= inv;
    }
    return Dataset(dim_, std::move(normalized), qualities_, labels_);
}

void SelectionParams::validate() const {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidArgument("lambda must be in [0, 1]");
    if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void ParamsEcho::set(const std::string& key, const std::string& value) {
    for (auto& kv : entries) {
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

void ParamsEcho::set(const std::string& key, double value) { set(key, format_double(value)); }

void ParamsEcho::set(const std::string& key, std::uint64_t value) {
    set(key, std::to_string(value));
}

const std::string* ParamsEcho::find(const std::string& key) const {
    for (const auto& kv : entries) {
        if (kv.first == key) return &kv.second;
    }
    return nullptr;
}

double SelectionResult::stage_ms(const std::string& name) const {
    for (const auto& st : stage_times) {
        if (st.name == name) return st.ms;
    }
    return 0.0;
}

}  // namespace muss
