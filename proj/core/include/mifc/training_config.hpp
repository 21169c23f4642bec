#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

namespace mifc {

enum class TrainingStage { kStage1Knowledge, kStage2Mc };
enum class AdapterKind { kDoraQuantized, kQlora };
enum class LrSchedule { kCosineToZero };

std::string_view stage_name(TrainingStage stage);
std::string_view adapter_name(AdapterKind adapter);
std::string_view lr_schedule_name(LrSchedule schedule);

struct TrainingStageConfig {
    TrainingStage stage = TrainingStage::kStage1Knowledge;
    AdapterKind adapter = AdapterKind::kDoraQuantized;
    int rank = 0;
    int alpha = 0;
    double dropout = 0.0;
    int epochs = 0;
    int batch_size = 0;
    double learning_rate = 0.0;
    LrSchedule lr_schedule = LrSchedule::kCosineToZero;
    double warmup_ratio = 0.0;
    int grad_accum_steps = 0;
    std::string target_modules = "all_linear";
    std::string dataset;
    bool merge_adapter_after = false;

    void validate() const;
    bool operator==(const TrainingStageConfig&) const = default;
};

TrainingStageConfig stage1_config();
TrainingStageConfig stage2_config();

struct DatasetManifest;

/// Both stage configs, checked against the manifests they train on.
std::pair<TrainingStageConfig, TrainingStageConfig> emit_training_configs(const DatasetManifest& ift,
                                                                          const DatasetManifest& mc);

nlohmann::ordered_json training_config_to_json(const TrainingStageConfig& cfg);
TrainingStageConfig training_config_from_json(const nlohmann::json& j);

/// Writes stage1_knowledge.json and stage2_mc.json into `dir`; returns their paths.
std::pair<std::filesystem::path, std::filesystem::path> write_training_configs(
    const std::filesystem::path& dir, const std::pair<TrainingStageConfig, TrainingStageConfig>& configs);

}  // namespace mifc
