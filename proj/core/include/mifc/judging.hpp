#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "mifc/llm_client.hpp"
#include "mifc/parsing.hpp"

namespace mifc {

enum class JudgeAggregation { kMeanAcrossJudges, kMinAcrossJudges };

std::string_view aggregation_name(JudgeAggregation agg);
JudgeAggregation parse_aggregation(std::string_view name);

struct JudgeConfig {
    std::vector<ProviderConfig> judges;
    /// Every aggregated criterion must reach this (>=) for acceptance.
    double per_criterion_threshold = 0.7;
    JudgeAggregation aggregation = JudgeAggregation::kMeanAcrossJudges;

    void validate() const;
};

struct JudgeVerdict {
    std::vector<JudgeScores> per_judge;
    JudgeScores aggregated;
    bool accepted = false;
};

/// Per-criterion mean or minimum across judges. The mean is the plain sum
/// divided by the judge count.
JudgeScores aggregate(std::span<const JudgeScores> per_judge, JudgeAggregation aggregation);

JudgeVerdict decide(std::vector<JudgeScores> per_judge, const JudgeConfig& cfg);

}  // namespace mifc
