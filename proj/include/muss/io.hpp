#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "muss/bench.hpp"
#include "muss/clustering.hpp"
#include "muss/oracle.hpp"
#include "muss/types.hpp"

namespace muss {

// Binary dataset format, little-endian throughout:
//   magic   4 bytes  "MUSS" (0x4D 0x55 0x53 0x53)
//   version u32      1
//   n       u64
//   d       u32
//   flags   u32      bit 0: labels present
//   records n x [ d * f32 embedding | f32 quality | u8 label if flagged ]
// Total size is exactly 24 + n * (4d + 4 + (labels ? 1 : 0)) bytes.
// Values are stored at 32-bit precision; memory stays 64-bit.

void save_dataset_binary(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset_binary(const std::filesystem::path& path);

/// Expected byte size of a binary dataset file.
std::uint64_t binary_dataset_size(std::uint64_t n, std::uint32_t dim, bool labels);

// JSONL dataset format: one object per line,
//   {"id": 0, "embedding": [..], "quality": 0.5, "label": 1}
// with `label` optional (all-or-none). Ids must be dense 0..n-1 but may
// appear in any order; the loader sorts. Errors name the offending line.

void save_dataset_jsonl(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset_jsonl(const std::filesystem::path& path);

/// Dispatches on the file's magic bytes (binary vs JSONL).
Dataset load_dataset(const std::filesystem::path& path);

// Cluster model JSON ("muss-model/1"): centroids, quality centers,
// assignments, per-cluster summaries, wcss, and the fit parameters.
void save_model_json(const Dataset& ds, const ClusterModel& model,
                     const std::filesystem::path& path);
ClusterModel load_model_json(const std::filesystem::path& path);

// Selection result JSON ("muss-result/1").
nlohmann::json result_to_json(const SelectionResult& result, const std::string& method);
void save_result_json(const SelectionResult& result, const std::string& method,
                      const std::filesystem::path& path);

// Verification reports ("muss-verify/1").
nlohmann::json bound_report_to_json(const BoundReport& report, const std::string& suite);
nlohmann::json lemma1_report_to_json(const Lemma1SuiteReport& report);
nlohmann::json sigma_sweep_report_to_json(const SigmaSweepReport& report);

// Benchmark reports ("muss-bench/1") and the flat CSV table.
nlohmann::json bench_report_to_json(const BenchReport& report);
std::string bench_report_to_csv(const BenchReport& report);
void save_text(const std::string& text, const std::filesystem::path& path);
void save_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace muss
