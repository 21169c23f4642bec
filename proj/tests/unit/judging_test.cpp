#include <gtest/gtest.h>

#include "mifc/error.hpp"
#include "mifc/judging.hpp"

namespace mifc {
namespace {

JudgeConfig two_judges(double threshold = 0.7, JudgeAggregation agg = JudgeAggregation::kMeanAcrossJudges) {
    JudgeConfig cfg;
    cfg.judges.resize(2);
    cfg.judges[0].model_name = "judge-a";
    cfg.judges[1].model_name = "judge-b";
    cfg.per_criterion_threshold = threshold;
    cfg.aggregation = agg;
    return cfg;
}

TEST(Judging, MeanOfPointEightAndOneIsPointNine) {
    const auto v = decide({{0.8, 0.8, 0.8}, {1.0, 1.0, 1.0}}, two_judges());
    EXPECT_EQ(v.aggregated.logically_consistent, 0.9);
    EXPECT_EQ(v.aggregated.factually_accurate, 0.9);
    EXPECT_EQ(v.aggregated.sound_reasoning, 0.9);
    EXPECT_TRUE(v.accepted);
}

TEST(Judging, AnyCriterionBelowThresholdRejects) {
    for (int c = 0; c < 3; ++c) {
        JudgeScores low{1.0, 1.0, 1.0};
        if (c == 0) low.logically_consistent = 0.3;
        if (c == 1) low.factually_accurate = 0.3;
        if (c == 2) low.sound_reasoning = 0.3;
        const auto v = decide({low, {1.0, 1.0, 1.0}}, two_judges());
        EXPECT_FALSE(v.accepted) << c;
    }
}

TEST(Judging, AllOnesAccept) {
    EXPECT_TRUE(decide({{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}, two_judges(1.0)).accepted);
}

TEST(Judging, ThresholdIsInclusive) {
    EXPECT_TRUE(decide({{0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}}, two_judges(0.7)).accepted);
}

TEST(Judging, MinAggregation) {
    const auto v = decide({{0.8, 0.9, 1.0}, {1.0, 0.6, 1.0}}, two_judges(0.7, JudgeAggregation::kMinAcrossJudges));
    EXPECT_EQ(v.aggregated.logically_consistent, 0.8);
    EXPECT_EQ(v.aggregated.factually_accurate, 0.6);
    EXPECT_FALSE(v.accepted);
}

TEST(Judging, EmptyScoresAndBadConfig) {
    EXPECT_THROW(aggregate({}, JudgeAggregation::kMeanAcrossJudges), ValidationError);
    JudgeConfig cfg;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(parse_aggregation("median"), ConfigError);
    EXPECT_EQ(parse_aggregation(aggregation_name(JudgeAggregation::kMinAcrossJudges)),
              JudgeAggregation::kMinAcrossJudges);
}

}  // namespace
}  // namespace mifc
