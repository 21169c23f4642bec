#include "mifc/judging.hpp"

#include <algorithm>

#include "mifc/error.hpp"

namespace mifc {

std::string_view aggregation_name(JudgeAggregation agg) {
    return agg == JudgeAggregation::kMeanAcrossJudges ? "mean_across_judges" : "min_across_judges";
}

JudgeAggregation parse_aggregation(std::string_view name) {
    if (name == "mean_across_judges") return JudgeAggregation::kMeanAcrossJudges;
    if (name == "min_across_judges") return JudgeAggregation::kMinAcrossJudges;
    throw ConfigError("unknown judge aggregation '" + std::string(name) + "'");
}

void JudgeConfig::validate() const {
    if (judges.empty()) throw ConfigError("judge.judges must list at least one judge");
    for (const auto& j : judges) j.validate();
    if (!(per_criterion_threshold >= 0.0 && per_criterion_threshold <= 1.0)) {
        throw ConfigError("judge.per_criterion_threshold must be in [0, 1]");
    }
}

JudgeScores aggregate(std::span<const JudgeScores> per_judge, JudgeAggregation aggregation) {
    if (per_judge.empty()) throw ValidationError("judges", "no judge scores to aggregate");
    JudgeScores out = per_judge.front();
    if (aggregation == JudgeAggregation::kMinAcrossJudges) {
        for (const auto& s : per_judge.subspan(1)) {
            out.logically_consistent = std::min(out.logically_consistent, s.logically_consistent);
            out.factually_accurate = std::min(out.factually_accurate, s.factually_accurate);
            out.sound_reasoning = std::min(out.sound_reasoning, s.sound_reasoning);
        }
        return out;
    }
    for (const auto& s : per_judge.subspan(1)) {
        out.logically_consistent += s.logically_consistent;
        out.factually_accurate += s.factually_accurate;
        out.sound_reasoning += s.sound_reasoning;
    }
    const auto n = static_cast<double>(per_judge.size());
    out.logically_consistent /= n;
    out.factually_accurate /= n;
    out.sound_reasoning /= n;
    return out;
}

JudgeVerdict decide(std::vector<JudgeScores> per_judge, const JudgeConfig& cfg) {
    JudgeVerdict v;
    v.aggregated = aggregate(per_judge, cfg.aggregation);
    v.per_judge = std::move(per_judge);
    const double t = cfg.per_criterion_threshold;
    v.accepted = v.aggregated.logically_consistent >= t && v.aggregated.factually_accurate >= t &&
                 v.aggregated.sound_reasoning >= t;
    return v;
}

}  // namespace mifc
