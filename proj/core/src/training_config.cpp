#include "mifc/training_config.hpp"

#include "mifc/assembly.hpp"
#include "mifc/error.hpp"
#include "mifc/jsonl_io.hpp"

namespace mifc {

std::string_view stage_name(TrainingStage stage) {
    return stage == TrainingStage::kStage1Knowledge ? "stage1_knowledge" : "stage2_mc";
}

std::string_view adapter_name(AdapterKind adapter) {
    return adapter == AdapterKind::kDoraQuantized ? "dora_quantized" : "qlora";
}

std::string_view lr_schedule_name(LrSchedule) { return "cosine_to_zero"; }

void TrainingStageConfig::validate() const {
    if (rank <= 0 || alpha <= 0) throw ValidationError("rank", "rank and alpha must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout", "must be in [0, 1)");
    if (epochs <= 0 || batch_size <= 0 || grad_accum_steps <= 0) {
        throw ValidationError("epochs", "epochs, batch_size and grad_accum_steps must be positive");
    }
    if (!(learning_rate > 0.0)) throw ValidationError("learning_rate", "must be positive");
    if (!(warmup_ratio >= 0.0 && warmup_ratio <= 1.0)) throw ValidationError("warmup_ratio", "must be in [0, 1]");
    if (stage == TrainingStage::kStage1Knowledge && !merge_adapter_after) {
        throw ValidationError("merge_adapter_after", "stage1 adapters are merged into the base model");
    }
}

TrainingStageConfig stage1_config() {
    TrainingStageConfig c;
    c.stage = TrainingStage::kStage1Knowledge;
    c.adapter = AdapterKind::kDoraQuantized;
    c.rank = 32;
    c.alpha = 16;
    c.dropout = 0.05;
    c.epochs = 2;
    c.batch_size = 1;
    c.learning_rate = 5e-5;
    c.lr_schedule = LrSchedule::kCosineToZero;
    c.warmup_ratio = 0.2;
    c.grad_accum_steps = 4;
    c.dataset = std::string(dataset_name(DatasetName::kMmedIft));
    c.merge_adapter_after = true;
    return c;
}

TrainingStageConfig stage2_config() {
    TrainingStageConfig c = stage1_config();
    c.stage = TrainingStage::kStage2Mc;
    c.adapter = AdapterKind::kQlora;
    c.rank = 16;
    c.alpha = 8;
    c.learning_rate = 2e-5;
    c.dataset = std::string(dataset_name(DatasetName::kMmedIftMc));
    c.merge_adapter_after = false;
    return c;
}

std::pair<TrainingStageConfig, TrainingStageConfig> emit_training_configs(const DatasetManifest& ift,
                                                                          const DatasetManifest& mc) {
    if (ift.name != DatasetName::kMmedIft) throw ValidationError("name", "stage1 needs the mmed_ift manifest");
    if (mc.name != DatasetName::kMmedIftMc) throw ValidationError("name", "stage2 needs the mmed_ift_mc manifest");
    ift.validate();
    mc.validate();
    auto configs = std::make_pair(stage1_config(), stage2_config());
    configs.first.validate();
    configs.second.validate();
    return configs;
}

nlohmann::ordered_json training_config_to_json(const TrainingStageConfig& c) {
    return {{"stage", stage_name(c.stage)},
            {"adapter", adapter_name(c.adapter)},
            {"rank", c.rank},
            {"alpha", c.alpha},
            {"dropout", c.dropout},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"lr_schedule", lr_schedule_name(c.lr_schedule)},
            {"warmup_ratio", c.warmup_ratio},
            {"grad_accum_steps", c.grad_accum_steps},
            {"target_modules", c.target_modules},
            {"dataset", c.dataset},
            {"merge_adapter_after", c.merge_adapter_after}};
}

TrainingStageConfig training_config_from_json(const nlohmann::json& j) {
    TrainingStageConfig c;
    try {
        const auto stage = j.at("stage").get<std::string>();
        if (stage == "stage1_knowledge") {
            c.stage = TrainingStage::kStage1Knowledge;
        } else if (stage == "stage2_mc") {
            c.stage = TrainingStage::kStage2Mc;
        } else {
            throw ValidationError("stage", "unknown stage '" + stage + "'");
        }
        const auto adapter = j.at("adapter").get<std::string>();
        if (adapter == "dora_quantized") {
            c.adapter = AdapterKind::kDoraQuantized;
        } else if (adapter == "qlora") {
            c.adapter = AdapterKind::kQlora;
        } else {
            throw ValidationError("adapter", "unknown adapter '" + adapter + "'");
        }
        if (j.at("lr_schedule").get<std::string>() != "cosine_to_zero") {
            throw ValidationError("lr_schedule", "only cosine_to_zero is supported");
        }
        c.rank = j.at("rank").get<int>();
        c.alpha = j.at("alpha").get<int>();
        c.dropout = j.at("dropout").get<double>();
        c.epochs = j.at("epochs").get<int>();
        c.batch_size = j.at("batch_size").get<int>();
        c.learning_rate = j.at("learning_rate").get<double>();
        c.warmup_ratio = j.at("warmup_ratio").get<double>();
        c.grad_accum_steps = j.at("grad_accum_steps").get<int>();
        c.target_modules = j.value("target_modules", c.target_modules);
        c.dataset = j.at("dataset").get<std::string>();
        c.merge_adapter_after = j.at("merge_adapter_after").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("training_config", e.what());
    }
    c.validate();
    return c;
}

std::pair<std::filesystem::path, std::filesystem::path> write_training_configs(
    const std::filesystem::path& dir, const std::pair<TrainingStageConfig, TrainingStageConfig>& configs) {
    std::filesystem::create_directories(dir);
    auto first = dir / "stage1_knowledge.json";
    auto second = dir / "stage2_mc.json";
    write_file_atomic(first, training_config_to_json(configs.first).dump(2) + "\n");
    write_file_atomic(second, training_config_to_json(configs.second).dump(2) + "\n");
    return {first, second};
}

}  // namespace mifc
