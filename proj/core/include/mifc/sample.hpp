#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mifc/language.hpp"

namespace mifc {

enum class SampleKind { kRawText, kShortAnswerQa, kMultipleChoiceQa };

std::string_view kind_name(SampleKind kind);
SampleKind parse_kind(std::string_view name);

struct McOption {
    std::string label;
    std::string text;

    bool operator==(const McOption&) const = default;
};

/// Scalar annotation value. Nested metric payloads use dotted keys instead of
/// nested objects, e.g. `ccts.bleu_mean`.
using AnnotationValue = std::variant<bool, std::int64_t, double, std::string>;
using Annotations = std::map<std::string, AnnotationValue, std::less<>>;

/// One corpus record as it appears on a JSONL line.
///
/// Field names are the wire contract:
///   id, lang, kind, question, options[{label,text}], rationale, answer,
///   raw_text, source, annotations{dotted.key: scalar}
/// Any other top-level field is kept in `extra_fields` and written back
/// unchanged.
struct DataSample {
    std::string id;
    Language lang = Language::kEN;
    SampleKind kind = SampleKind::kRawText;
    std::optional<std::string> question;
    std::optional<std::vector<McOption>> options;
    std::optional<std::string> rationale;
    std::optional<std::string> answer;
    std::optional<std::string> raw_text;
    std::string source;
    Annotations annotations;
    std::map<std::string, nlohmann::json> extra_fields;

    bool operator==(const DataSample&) const = default;
};

/// Checks the per-kind invariants. Throws ValidationError naming the field.
void validate(const DataSample& sample);

/// Parses and validates one JSONL line. `line_no` (1-based) is only used for
/// diagnostics. Malformed JSON throws FormatError; invariant violations throw
/// ValidationError.
DataSample parse_sample(std::string_view line, std::size_t line_no = 0);

/// Single-line JSON with a fixed key order; non-ASCII is written as raw UTF-8.
std::string serialize_sample(const DataSample& sample);

nlohmann::ordered_json sample_to_json(const DataSample& sample);
DataSample sample_from_json(const nlohmann::json& obj);

/// Text scored by the keyword filter: raw_text, or question + " " + answer.
std::string filter_text(const DataSample& sample);

/// Sets one annotation key. Existing keys from other stages are never erased.
void annotate(DataSample& sample, std::string key, AnnotationValue value);

/// Convenience lookups; return nullopt when the key is missing or has another type.
std::optional<double> annotation_number(const DataSample& sample, std::string_view key);
std::optional<std::string> annotation_string(const DataSample& sample, std::string_view key);

nlohmann::json to_json(const AnnotationValue& value);

}  // namespace mifc
