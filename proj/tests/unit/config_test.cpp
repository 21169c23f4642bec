#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mifc/config.hpp"
#include "mifc/error.hpp"

namespace mifc {
namespace {

namespace fs = std::filesystem;

TEST(Config, DefaultsAreValid) {
    const auto cfg = PipelineConfig::defaults();
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.judge.judges.size(), 2u);
    EXPECT_DOUBLE_EQ(cfg.ccts.accept_threshold, 0.8);
    EXPECT_DOUBLE_EQ(cfg.ccts.lambda1, 0.5);
    EXPECT_DOUBLE_EQ(cfg.ccts.lambda2, 0.5);
    EXPECT_DOUBLE_EQ(cfg.judge.per_criterion_threshold, 0.7);
    EXPECT_EQ(cfg.probes_per_language, 100u);
    EXPECT_THROW(cfg.validate(true), ConfigError);
}

TEST(Config, ReadsNestedValuesAndKeywordFile) {
    const auto dir = fs::temp_directory_path() / "mifc_config_test";
    fs::create_directories(dir);
    std::ofstream(dir / "kw.txt") << "diabetes\n\ninsulin\n";
    const auto j = nlohmann::json::parse(R"({
        "filter": {"keywords": ["glucose"], "keywords_file": "kw.txt", "thres1": 0.1, "thres2": 3, "match_mode": "substring"},
        "ccts": {"lambda1": 0.7, "lambda2": 0.3, "accept_threshold": 0.85, "tokenizer_mode": "character"},
        "judge": {"judges": [{"base_url": "http://localhost:1", "model_name": "j1"}], "aggregation": "min_across_judges"},
        "concurrency_limit": 2, "seed": 42
    })");
    const auto cfg = config_from_json(j, dir);
    EXPECT_EQ(cfg.filter.keywords, (std::vector<std::string>{"glucose", "diabetes", "insulin"}));
    EXPECT_EQ(cfg.filter.match_mode, MatchMode::kSubstring);
    EXPECT_EQ(cfg.ccts.tokenizer_mode, TokenizerMode::kCharacter);
    EXPECT_EQ(cfg.judge.judges.size(), 1u);
    EXPECT_EQ(cfg.judge.aggregation, JudgeAggregation::kMinAcrossJudges);
    EXPECT_EQ(cfg.concurrency_limit, 2u);
    EXPECT_EQ(cfg.seed, 42u);
}

TEST(Config, InvalidValuesAreConfigErrors) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"ccts":{"accept_threshold":1.5}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"judge":{"judges":[]}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"concurrency_limit":0})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"filter":{"thres1":"high"}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"([1,2])")), ConfigError);
}

TEST(Config, DigestIsStableAndSensitive) {
    auto a = PipelineConfig::defaults();
    auto b = PipelineConfig::defaults();
    EXPECT_EQ(config_digest(a), config_digest(b));
    b.seed = 1;
    EXPECT_NE(config_digest(a), config_digest(b));
    EXPECT_EQ(config_digest(config_from_json(config_to_json(a))), config_digest(a));
}

}  // namespace
}  // namespace mifc
