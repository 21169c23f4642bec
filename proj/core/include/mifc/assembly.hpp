#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mifc/config.hpp"
#include "mifc/leakage.hpp"

namespace mifc {

enum class DatasetName { kMmedIft, kMmedIftMc };
enum class Split { kTrain, kTest };

std::string_view dataset_name(DatasetName name);
DatasetName parse_dataset_name(std::string_view name);
std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct ShardFile {
    /// Relative to the output directory, forward slashes.
    std::string path;
    std::size_t samples = 0;
    std::string sha256;

    bool operator==(const ShardFile&) const = default;
};

struct DatasetManifest {
    DatasetName name = DatasetName::kMmedIft;
    std::map<Language, std::size_t> per_language_counts;
    std::vector<ShardFile> files;
    std::size_t input_samples = 0;
    std::size_t exact_dups_removed = 0;
    std::size_t near_dups_removed = 0;
    LeakageReport leakage;
    std::string created_at;
    std::string config_digest;

    std::size_t total() const;
    /// per_language_counts and shard counts agree, and equal input minus removals.
    void validate() const;
    bool operator==(const DatasetManifest&) const = default;
};

nlohmann::ordered_json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);
std::string serialize_manifest(const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

struct AssemblyInput {
    std::filesystem::path path;
    Language lang = Language::kEN;
    DatasetName dataset = DatasetName::kMmedIft;
    /// Test-split inputs only feed the leakage check and are never written.
    Split split = Split::kTrain;
};

struct AssemblySpec {
    std::vector<AssemblyInput> inputs;
    /// Fixed timestamp for reproducible manifests; otherwise SOURCE_DATE_EPOCH
    /// or the current time is used.
    std::optional<std::string> created_at;
};

/// Input paths resolve against `base_dir` when relative.
AssemblySpec assembly_spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
AssemblySpec load_assembly_spec(const std::filesystem::path& path);

struct AssemblyResult {
    DatasetManifest ift;
    DatasetManifest mc;
    std::filesystem::path ift_manifest_path;
    std::filesystem::path mc_manifest_path;
};

/// Reads and validates every input, dedups within each language, runs the
/// leakage check when both datasets have data, then writes
/// `<dataset>/<dataset>.<lang>.jsonl` shards and `<dataset>.manifest.json`
/// under `out_dir`. Holds `.assemble.lock` in
/// `out_dir` for the duration; a second concurrent assembly fails with
/// ConfigError.
AssemblyResult assemble(const AssemblySpec& spec, const PipelineConfig& cfg, const std::filesystem::path& out_dir);

/// ISO-8601 UTC, seconds precision.
std::string format_utc(std::int64_t epoch_seconds);

}  // namespace mifc
