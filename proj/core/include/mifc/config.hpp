#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mifc/dedup.hpp"
#include "mifc/filtering.hpp"
#include "mifc/judging.hpp"
#include "mifc/llm_client.hpp"
#include "mifc/metrics.hpp"

namespace mifc {

enum class EmbeddingKind { kTestDeterministic, kHttp };

struct EmbeddingConfig {
    EmbeddingKind kind = EmbeddingKind::kTestDeterministic;
    std::size_t dim = 128;
    std::uint64_t seed = 0;
    /// Used when kind == kHttp.
    ProviderConfig provider;
};

struct PipelineConfig {
    FilterConfig filter;
    CctsConfig ccts;
    JudgeConfig judge;
    /// Generator and translator endpoint.
    ProviderConfig provider;
    EmbeddingConfig embedding;
    DedupConfig dedup;
    std::size_t probes_per_language = 100;
    std::size_t concurrency_limit = 4;
    std::uint64_t seed = 0;

    /// Defaults: generator gpt-4o-mini at temperature 0.7, two judges at 0.0.
    static PipelineConfig defaults();

    /// Checks every nested config. The keyword list is only required when
    /// `require_keywords` is set, since most commands never filter.
    void validate(bool require_keywords = false) const;
};

/// Reads a config JSON object on top of the defaults. Relative
/// `filter.keywords_file` paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (sorted keys); the config digest hashes exactly this.
nlohmann::json config_to_json(const PipelineConfig& cfg);
std::string config_digest(const PipelineConfig& cfg);

nlohmann::json provider_to_json(const ProviderConfig& p);
ProviderConfig provider_from_json(const nlohmann::json& j, ProviderConfig base = {});

}  // namespace mifc
