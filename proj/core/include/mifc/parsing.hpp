#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mifc/sample.hpp"

namespace mifc {

struct CondensedText {
    std::string text;
    /// Set when the `###Cleaned Text:` marker was missing and the whole
    /// response was taken as the cleaned text.
    bool lenient = false;
};

/// Reads a condense-step response. Throws ParseError on an empty response or
/// on a marker followed by nothing.
CondensedText parse_condensed(std::string_view response);

struct McQuestion {
    std::string question;
    std::vector<McOption> options;  // exactly A, B, C, D
    std::string rationale;
    std::string answer;             // one of "A".."D"

    bool operator==(const McQuestion&) const = default;
};

struct ShortAnswerQuestion {
    std::string question;
    std::string answer;

    bool operator==(const ShortAnswerQuestion&) const = default;
};

struct GeneratedPair {
    McQuestion mc;
    ShortAnswerQuestion short_answer;

    bool operator==(const GeneratedPair&) const = default;
};

/// Parses a generation response of the form
///
///   ###Question: ...  ###Options: A. .., B. .., C. .., D. ..
///   ###Rationale: ... ###Answer: B
///   [SEP]
///   ###Question: ...  ###Answer: ...
///
/// Markers are matched exactly (case-sensitive). Whitespace around fields is
/// free. Options are cut at the A./B./C./D. labels, so commas inside option
/// text survive. An answer written as "B. optionB" is reduced to "B".
///
/// Throws ParseError (missing `[SEP]`, missing or duplicated markers, options
/// that cannot be split) or ValidationError (empty fields, answer outside A-D).
GeneratedPair parse_generated_pair(std::string_view response);

/// Canonical text form of a pair in the same grammar; parse_generated_pair
/// inverts it exactly for trimmed, non-empty fields.
std::string render_generated_pair(const GeneratedPair& pair);

/// Same grammar for a single block; used when a lone sample is sent to a judge.
std::string render_mc_block(const McQuestion& mc);
std::string render_short_block(const ShortAnswerQuestion& sa);

struct JudgeScores {
    double logically_consistent = 0.0;
    double factually_accurate = 0.0;
    double sound_reasoning = 0.0;

    bool operator==(const JudgeScores&) const = default;
};

inline constexpr std::string_view kCriterionLogic = "logically consistent";
inline constexpr std::string_view kCriterionFact = "factually accurate";
inline constexpr std::string_view kCriterionReasoning = "sound reasoning";

/// Extracts the first JSON object in a judge response (prose and code fences
/// around it are ignored, single-quoted pseudo-JSON is accepted) and reads the
/// three criteria, by their spaced or underscored names. Missing keys and
/// non-numeric values are ParseErrors; values outside [0, 1] are
/// ValidationErrors.
JudgeScores parse_judge(std::string_view response);

}  // namespace mifc
