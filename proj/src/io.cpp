#include "muss/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "muss/error.hpp"

namespace muss {

namespace {

using nlohmann::json;

constexpr std::uint8_t kMagic[4] = {0x4D, 0x55, 0x53, 0x53};  // "MUSS"
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagLabels = 1u;

// The format is little-endian by definition; encode integers bytewise so
// the writer works on any host.
template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        os.put(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
}

template <typename T>
T get_le(std::istream& is) {
    static_assert(std::is_unsigned_v<T>);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        const int byte = is.get();
        if (byte == EOF) throw DataError("binary dataset: unexpected end of file");
        value |= static_cast<T>(static_cast<std::uint8_t>(byte)) << (8 * i);
    }
    return value;
}

void put_f32(std::ostream& os, float value) {
    std::uint32_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    put_le(os, bits);
}

float get_f32(std::istream& is) {
    const std::uint32_t bits = get_le<std::uint32_t>(is);
    float value;
    std::memcpy(&value, &bits, sizeof(value));
    return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream os(path, mode);
    if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream is(path, mode);
    if (!is) throw DataError("cannot open '" + path.string() + "' for reading");
    return is;
}

json echo_to_json(const ParamsEcho& echo) {
    json j = json::object();
    for (const auto& [key, value] : echo.entries) j[key] = value;
    return j;
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "";  // absent: e.g. stderr with < 2 repeats
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

std::uint64_t binary_dataset_size(std::uint64_t n, std::uint32_t dim, bool labels) {
    return 24 + n * (4ull * dim + 4 + (labels ? 1 : 0));
}

void save_dataset_binary(const Dataset& ds, const std::filesystem::path& path) {
    auto os = open_out(path, std::ios::binary);
    os.write(reinterpret_cast<const char*>(kMagic), 4);
    put_le(os, kVersion);
    put_le(os, static_cast<std::uint64_t>(ds.size()));
    put_le(os, static_cast<std::uint32_t>(ds.dim()));
    put_le(os, ds.has_labels() ? kFlagLabels : 0u);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto emb = ds.embedding(static_cast<ItemId>(i));
        for (double v : emb) put_f32(os, static_cast<float>(v));
        put_f32(os, static_cast<float>(ds.quality(static_cast<ItemId>(i))));
        if (ds.has_labels()) os.put(ds.label(static_cast<ItemId>(i)) ? 1 : 0);
    }
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

Dataset load_dataset_binary(const std::filesystem::path& path) {
    auto is = open_in(path, std::ios::binary);
    std::uint8_t magic[4];
    is.read(reinterpret_cast<char*>(magic), 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("'" + path.string() + "' is not a binary dataset (bad magic)");
    const auto version = get_le<std::uint32_t>(is);
    if (version != kVersion)
        throw DataError("unsupported binary dataset version " + std::to_string(version));
    const auto n = get_le<std::uint64_t>(is);
    const auto dim = get_le<std::uint32_t>(is);
    const auto flags = get_le<std::uint32_t>(is);
    const bool labels = (flags & kFlagLabels) != 0;
    if (dim == 0) throw DataError("binary dataset: dimension must be positive");

    // The format has a closed-form size; check it before allocating.
    const std::uint64_t expected_size = binary_dataset_size(n, dim, labels);
    const std::uint64_t actual_size = std::filesystem::file_size(path);
    if (actual_size != expected_size)
        throw DataError("'" + path.string() + "' is " + std::to_string(actual_size) +
                        " bytes, expected " + std::to_string(expected_size) +
                        " for n=" + std::to_string(n) + ", d=" + std::to_string(dim) +
                        (labels ? " with labels" : ""));

    std::vector<double> embeddings;
    embeddings.reserve(n * dim);
    std::vector<double> qualities;
    qualities.reserve(n);
    std::vector<std::uint8_t> label_bytes;
    if (labels) label_bytes.reserve(n);

    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint32_t c = 0; c < dim; ++c) embeddings.push_back(get_f32(is));
        qualities.push_back(get_f32(is));
        if (labels) {
            const int byte = is.get();
            if (byte == EOF) throw DataError("binary dataset: unexpected end of file");
            label_bytes.push_back(static_cast<std::uint8_t>(byte));
        }
    }
    if (is.peek() != EOF) throw DataError("binary dataset: trailing bytes after payload");
    try {
        return Dataset(dim, std::move(embeddings), std::move(qualities), std::move(label_bytes));
    } catch (const InvalidArgument& e) {
        throw DataError("binary dataset '" + path.string() + "': " + e.what());
    }
}

void save_dataset_jsonl(const Dataset& ds, const std::filesystem::path& path) {
    auto os = open_out(path, std::ios::out);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        json line;
        line["id"] = i;
        const auto emb = ds.embedding(static_cast<ItemId>(i));
        line["embedding"] = std::vector<double>(emb.begin(), emb.end());
        line["quality"] = ds.quality(static_cast<ItemId>(i));
        if (ds.has_labels()) line["label"] = ds.label(static_cast<ItemId>(i)) ? 1 : 0;
        os << line.dump() << '\n';
    }
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

Dataset load_dataset_jsonl(const std::filesystem::path& path) {
    auto is = open_in(path, std::ios::in);
    struct Row {
        std::vector<double> embedding;
        double quality = 0.0;
        int label = -1;
    };
    std::vector<std::pair<std::uint64_t, Row>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::uint64_t id = 0;
        Row row;
        try {
            const json j = json::parse(line);
            if (!j.contains("id") || !j.contains("embedding") || !j.contains("quality"))
                throw DataError("object needs 'id', 'embedding', and 'quality'");
            id = j.at("id").get<std::uint64_t>();
            row.embedding = j.at("embedding").get<std::vector<double>>();
            row.quality = j.at("quality").get<double>();
            if (j.contains("label")) row.label = j.at("label").get<int>();
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (dim == 0) dim = row.embedding.size();
        if (row.embedding.size() != dim)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": dimension " +
                            std::to_string(row.embedding.size()) + " differs from " +
                            std::to_string(dim));
        rows.emplace_back(id, std::move(row));
    }
    if (rows.empty()) throw DataError(path.string() + ": no items");

    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t labeled = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != i)
            throw DataError(path.string() + ": ids must be dense 0..n-1 (missing or duplicate id " +
                            std::to_string(i) + ")");
        if (rows[i].second.label >= 0) ++labeled;
    }
    if (labeled != 0 && labeled != rows.size())
        throw DataError(path.string() + ": labels must be present on all items or none");

    std::vector<double> embeddings;
    embeddings.reserve(rows.size() * dim);
    std::vector<double> qualities;
    qualities.reserve(rows.size());
    std::vector<std::uint8_t> labels;
    for (auto& [id, row] : rows) {
        embeddings.insert(embeddings.end(), row.embedding.begin(), row.embedding.end());
        qualities.push_back(row.quality);
        if (labeled) labels.push_back(row.label > 0 ? 1 : 0);
    }
    try {
        return Dataset(dim, std::move(embeddings), std::move(qualities), std::move(labels));
    } catch (const InvalidArgument& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

Dataset load_dataset(const std::filesystem::path& path) {
    auto is = open_in(path, std::ios::binary);
    std::uint8_t magic[4] = {0, 0, 0, 0};
    is.read(reinterpret_cast<char*>(magic), 4);
    is.close();
    if (std::memcmp(magic, kMagic, 4) == 0) return load_dataset_binary(path);
    return load_dataset_jsonl(path);
}

void save_model_json(const Dataset& ds, const ClusterModel& model,
                     const std::filesystem::path& path) {
    json j;
    j["schema"] = "muss-model/1";
    j["n"] = model.assignments.size();
    j["dim"] = model.dim;
    j["l"] = model.l;
    j["params"] = {{"quality_weight", model.quality_weight},
                   {"seed", model.seed}};
    j["wcss"] = model.wcss;
    j["iterations_run"] = model.iterations_run;
    json centroids = json::array();
    for (std::size_t c = 0; c < model.l; ++c) {
        const auto row = model.centroid(c);
        centroids.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["centroids"] = std::move(centroids);
    j["quality_centers"] = model.quality_centers;
    j["assignments"] = model.assignments;

    json summaries = json::array();
    for (const auto& s : summarize_clusters(ds, model)) {
        summaries.push_back({{"cluster_id", s.cluster_id},
                             {"centroid", s.centroid},
                             {"median_quality", s.median_quality},
                             {"radius", s.radius},
                             {"size", s.size},
                             {"member_ids", s.member_ids}});
    }
    j["summaries"] = std::move(summaries);
    save_json(j, path);
}

ClusterModel load_model_json(const std::filesystem::path& path) {
    auto is = open_in(path, std::ios::in);
    ClusterModel model;
    try {
        json j;
        is >> j;
        if (j.value("schema", "") != "muss-model/1")
            throw DataError(path.string() + ": not a muss-model/1 file");
        model.l = j.at("l").get<std::size_t>();
        model.dim = j.at("dim").get<std::size_t>();
        model.quality_centers = j.at("quality_centers").get<std::vector<double>>();
        model.assignments = j.at("assignments").get<std::vector<std::uint32_t>>();
        model.wcss = j.at("wcss").get<double>();
        model.iterations_run = j.at("iterations_run").get<std::size_t>();
        model.quality_weight = j.at("params").at("quality_weight").get<double>();
        model.seed = j.at("params").at("seed").get<std::uint64_t>();
        model.centroids.reserve(model.l * model.dim);
        for (const auto& row : j.at("centroids")) {
            const auto values = row.get<std::vector<double>>();
            if (values.size() != model.dim)
                throw DataError(path.string() + ": centroid dimension mismatch");
            model.centroids.insert(model.centroids.end(), values.begin(), values.end());
        }
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (model.centroids.size() != model.l * model.dim ||
        model.quality_centers.size() != model.l)
        throw DataError(path.string() + ": inconsistent model shapes");
    for (std::uint32_t a : model.assignments) {
        if (a >= model.l) throw DataError(path.string() + ": assignment out of range");
    }
    return model;
}

nlohmann::json result_to_json(const SelectionResult& result, const std::string& method) {
    json j;
    j["schema"] = "muss-result/1";
    j["method"] = method;
    j["selected"] = result.selected;
    j["objective"] = result.objective;
    j["quality_term"] = result.quality_term;
    j["diversity_term"] = result.diversity_term;
    j["objective_mean_scaled"] = result.objective_mean_scaled;
    j["wall_time_ms"] = result.wall_time_ms;
    j["params"] = echo_to_json(result.params_echo);
    json stages = json::object();
    for (const auto& st : result.stage_times) stages[st.name] = st.ms;
    j["stage_times_ms"] = std::move(stages);
    j["warnings"] = result.warnings;
    return j;
}

void save_result_json(const SelectionResult& result, const std::string& method,
                      const std::filesystem::path& path) {
    save_json(result_to_json(result, method), path);
}

namespace {

json check_to_json(const BoundCheck& check) {
    return {{"lhs", check.lhs}, {"rhs", check.rhs}, {"pass", check.pass}, {"slack", check.slack()}};
}

}  // namespace

nlohmann::json bound_report_to_json(const BoundReport& report, const std::string& suite) {
    json j;
    j["schema"] = "muss-verify/1";
    j["suite"] = suite;
    j["params"] = {{"n", report.params.n},
                   {"k", report.params.k},
                   {"m", report.params.m},
                   {"l", report.params.l},
                   {"k_within", report.params.k_within},
                   {"lambda", report.params.lambda},
                   {"lambda_c", report.params.lambda_c},
                   {"trials", report.params.trials},
                   {"seed", report.params.seed},
                   {"dim", report.params.dim}};
    json trials = json::array();
    for (const auto& t : report.trials) {
        json row = {{"trial", t.trial}, {"seed", t.seed}, {"f_opt", t.f_opt}};
        if (t.dgds_half) row["dgds_half"] = check_to_json(*t.dgds_half);
        if (t.dgds_caller) row["dgds_caller"] = check_to_json(*t.dgds_caller);
        if (t.multilevel) {
            row["multilevel"] = check_to_json(*t.multilevel);
            row["alpha"] = t.alpha;
            row["beta"] = t.beta;
            row["radius"] = t.radius;
        }
        if (t.union_diversity) row["union_diversity"] = check_to_json(*t.union_diversity);
        if (t.union_quality) row["union_quality"] = check_to_json(*t.union_quality);
        trials.push_back(std::move(row));
    }
    j["trials"] = std::move(trials);
    j["total_trials"] = report.trials.size();
    j["union_checks_skipped"] = report.union_checks_skipped;
    j["violations"] = report.violations;
    j["violation_details"] = report.violation_details;
    j["passed"] = report.pass();
    return j;
}

nlohmann::json lemma1_report_to_json(const Lemma1SuiteReport& report) {
    json j;
    j["schema"] = "muss-verify/1";
    j["suite"] = "lemma1";
    j["params"] = {{"n", report.params.n},
                   {"k", report.params.k},
                   {"lambda", report.params.lambda},
                   {"trials", report.params.trials},
                   {"seed", report.params.seed},
                   {"dim", report.params.dim}};
    j["trials_run"] = report.trials_run;
    j["candidates_checked"] = report.candidates_checked;
    j["violations"] = report.violations;
    j["min_quality_slack"] = report.min_quality_slack;
    j["min_distance_slack"] = report.min_distance_slack;
    j["violation_details"] = report.violation_details;
    j["passed"] = report.pass();
    return j;
}

nlohmann::json sigma_sweep_report_to_json(const SigmaSweepReport& report) {
    json j;
    j["schema"] = "muss-verify/1";
    j["suite"] = "lemma8";
    j["params"] = {{"n", report.params.n},
                   {"k", report.params.k},
                   {"lambda", report.params.lambda},
                   {"trials", report.params.trials},
                   {"seed", report.params.seed},
                   {"dim", report.params.dim}};
    json trials = json::array();
    for (const auto& t : report.trials) {
        trials.push_back({{"trial", t.trial},
                          {"seed", t.seed},
                          {"f_opt", t.f_opt},
                          {"f_sigma_half", t.f_sigma_half},
                          {"f_sweep_best", t.f_sweep_best},
                          {"ratio_half", t.f_opt > 0 ? t.f_sigma_half / t.f_opt : 1.0},
                          {"ratio_sweep", t.f_opt > 0 ? t.f_sweep_best / t.f_opt : 1.0},
                          {"pass", t.pass}});
    }
    j["trials"] = std::move(trials);
    j["total_trials"] = report.trials.size();
    j["violations"] = report.violations;
    j["violation_details"] = report.violation_details;
    j["passed"] = report.pass();
    return j;
}

nlohmann::json bench_report_to_json(const BenchReport& report) {
    json j;
    j["schema"] = "muss-bench/1";
    j["k"] = report.k;
    j["repeats"] = report.repeats;
    j["seed"] = report.seed;
    json rows = json::array();
    for (const auto& row : report.rows) {
        json samples = json::array();
        for (const auto& s : row.samples) {
            json sample = {{"objective_mean_scaled", s.objective_mean_scaled},
                           {"quality_mean", s.quality_mean},
                           {"diversity_mean", s.diversity_mean},
                           {"wall_time_ms", s.wall_time_ms},
                           {"failed", s.failed}};
            if (!std::isnan(s.precision)) sample["precision"] = s.precision;
            if (s.failed) sample["error"] = s.error;
            json stages = json::object();
            for (const auto& st : s.stage_times) stages[st.name] = st.ms;
            sample["stage_times_ms"] = std::move(stages);
            samples.push_back(std::move(sample));
        }
        json agg = {{"objective_mean", row.mean_objective()},
                    {"quality_mean", row.mean_quality()},
                    {"diversity_mean", row.mean_diversity()},
                    {"time_ms_mean", row.mean_time_ms()},
                    {"time_ms_median", row.median_time_ms()}};
        if (!std::isnan(row.mean_precision())) agg["precision_mean"] = row.mean_precision();
        if (!std::isnan(row.stderr_precision())) agg["precision_stderr"] = row.stderr_precision();
        if (!std::isnan(row.stderr_objective())) agg["objective_stderr"] = row.stderr_objective();
        if (!std::isnan(row.stderr_time_ms())) agg["time_ms_stderr"] = row.stderr_time_ms();
        rows.push_back({{"method", row.method},
                        {"lambda", row.lambda},
                        {"lambda_c", row.lambda_c},
                        {"l", row.l},
                        {"m", row.m},
                        {"k_within", row.k_within},
                        {"k", row.k},
                        {"failed_runs", row.failed_runs()},
                        {"aggregate", std::move(agg)},
                        {"samples", std::move(samples)}});
    }
    j["rows"] = std::move(rows);
    return j;
}

std::string bench_report_to_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "method,lambda,lambda_c,l,m,k_within,k,repeats,failed_runs,"
          "precision_mean,precision_stderr,objective_mean,objective_stderr,"
          "quality_mean,diversity_mean,time_ms_mean,time_ms_median,time_ms_stderr,"
          "stage_clustering_ms,stage_partition_ms,stage_cluster_select_ms,"
          "stage_within_cluster_ms,stage_topk_ms,stage_final_ms\n";
    for (const auto& row : report.rows) {
        os << row.method << ',' << csv_number(row.lambda) << ',' << csv_number(row.lambda_c) << ','
           << row.l << ',' << row.m << ',' << row.k_within << ',' << row.k << ','
           << row.samples.size() << ',' << row.failed_runs() << ','
           << csv_number(row.mean_precision()) << ',' << csv_number(row.stderr_precision()) << ','
           << csv_number(row.mean_objective()) << ',' << csv_number(row.stderr_objective()) << ','
           << csv_number(row.mean_quality()) << ',' << csv_number(row.mean_diversity()) << ','
           << csv_number(row.mean_time_ms()) << ',' << csv_number(row.median_time_ms()) << ','
           << csv_number(row.stderr_time_ms()) << ',' << csv_number(row.mean_stage_ms("clustering"))
           << ',' << csv_number(row.mean_stage_ms("partition")) << ','
           << csv_number(row.mean_stage_ms("cluster_select")) << ','
           << csv_number(row.mean_stage_ms("within_cluster")) << ','
           << csv_number(row.mean_stage_ms("topk")) << ','
           << csv_number(row.mean_stage_ms("final")) << '\n';
    }
    return os.str();
}

void save_text(const std::string& text, const std::filesystem::path& path) {
    auto os = open_out(path, std::ios::out);
    os << text;
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

void save_json(const nlohmann::json& j, const std::filesystem::path& path) {
    auto os = open_out(path, std::ios::out);
    os << j.dump(2) << '\n';
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace muss
