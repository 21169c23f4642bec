#include "mifc/sample.hpp"

#include <cmath>
#include <set>

#include "mifc/error.hpp"
#include "mifc/utf8.hpp"

namespace mifc {
namespace {

using json = nlohmann::json;

const std::set<std::string, std::less<>> kKnownFields = {
    "id", "lang", "kind", "question", "options", "rationale",
    "answer", "raw_text", "source", "annotations"};

std::optional<std::string> optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ValidationError(key, "expected a string");
    return it->get<std::string>();
}

std::string required_string(const json& obj, const char* key) {
    auto value = optional_string(obj, key);
    if (!value) throw ValidationError(key, "required field is missing");
    return *value;
}

AnnotationValue annotation_from_json(const std::string& key, const json& v) {
    switch (v.type()) {
        case json::value_t::boolean: return v.get<bool>();
        case json::value_t::number_integer: return v.get<std::int64_t>();
        case json::value_t::number_unsigned: {
            const auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(INT64_MAX)) {
                throw ValidationError("annotations." + key, "integer out of range");
            }
            return static_cast<std::int64_t>(u);
        }
        case json::value_t::number_float: return v.get<double>();
        case json::value_t::string: return v.get<std::string>();
        default:
            throw ValidationError("annotations." + key, "annotation values must be scalars");
    }
}

}  // namespace

std::string_view kind_name(SampleKind kind) {
    switch (kind) {
        case SampleKind::kRawText: return "raw_text";
        case SampleKind::kShortAnswerQa: return "short_answer_qa";
        case SampleKind::kMultipleChoiceQa: return "multiple_choice_qa";
    }
    return "unknown";
}

SampleKind parse_kind(std::string_view name) {
    if (name == "raw_text") return SampleKind::kRawText;
    if (name == "short_answer_qa") return SampleKind::kShortAnswerQa;
    if (name == "multiple_choice_qa") return SampleKind::kMultipleChoiceQa;
    throw ValidationError("kind", "unknown kind '" + std::string(name) + "'");
}

void validate(const DataSample& s) {
    if (s.id.empty()) throw ValidationError("id", "must be non-empty");
    for (const auto& [key, value] : s.annotations) {
        if (key.empty()) throw ValidationError("annotations", "empty annotation key");
        if (const double* d = std::get_if<double>(&value); d && !std::isfinite(*d)) {
            throw ValidationError("annotations." + key, "non-finite number");
        }
    }
    switch (s.kind) {
        case SampleKind::kRawText:
            if (!s.raw_text) throw ValidationError("raw_text", "required for kind=raw_text");
            if (s.question) throw ValidationError("question", "must be absent for kind=raw_text");
            if (s.options) throw ValidationError("options", "must be absent for kind=raw_text");
            break;
        case SampleKind::kShortAnswerQa:
            if (!s.question) throw ValidationError("question", "required for kind=short_answer_qa");
            if (!s.answer) throw ValidationError("answer", "required for kind=short_answer_qa");
            if (s.options) throw ValidationError("options", "must be absent for kind=short_answer_qa");
            break;
        case SampleKind::kMultipleChoiceQa: {
            if (!s.question) throw ValidationError("question", "required for kind=multiple_choice_qa");
            if (!s.options) throw ValidationError("options", "required for kind=multiple_choice_qa");
            if (!s.answer) throw ValidationError("answer", "required for kind=multiple_choice_qa");
            if (s.options->size() < 2) throw ValidationError("options", "need at least 2 options");
            std::set<std::string_view> labels;
            for (const auto& opt : *s.options) {
                if (opt.label.empty()) throw ValidationError("options", "empty option label");
                if (!labels.insert(opt.label).second) {
                    throw ValidationError("options", "duplicate option label '" + opt.label + "'");
                }
            }
            if (!labels.contains(*s.answer)) {
                throw ValidationError("answer", "'" + *s.answer + "' does not match any option label");
            }
            break;
        }
    }
}

DataSample sample_from_json(const json& obj) {
    if (!obj.is_object()) throw FormatError("record is not a JSON object");
    DataSample s;
    s.id = required_string(obj, "id");
    s.lang = parse_language(required_string(obj, "lang"));
    s.kind = parse_kind(required_string(obj, "kind"));
    s.question = optional_string(obj, "question");
    s.rationale = optional_string(obj, "rationale");
    s.answer = optional_string(obj, "answer");
    s.raw_text = optional_string(obj, "raw_text");
    s.source = required_string(obj, "source");

    if (auto it = obj.find("options"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw ValidationError("options", "expected an array");
        std::vector<McOption> options;
        for (const auto& entry : *it) {
            if (!entry.is_object()) throw ValidationError("options", "entries must be {label, text}");
            auto label = entry.find("label");
            auto text = entry.find("text");
            if (label == entry.end() || !label->is_string() || text == entry.end() || !text->is_string()) {
                throw ValidationError("options", "entries must be {label, text} strings");
            }
            options.push_back({label->get<std::string>(), text->get<std::string>()});
        }
        s.options = std::move(options);
    }

    if (auto it = obj.find("annotations"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) throw ValidationError("annotations", "expected an object");
        for (const auto& [key, value] : it->items()) {
            s.annotations.emplace(key, annotation_from_json(key, value));
        }
    }

    for (const auto& [key, value] : obj.items()) {
        if (!kKnownFields.contains(key)) s.extra_fields.emplace(key, value);
    }

    validate(s);
    return s;
}

DataSample parse_sample(std::string_view line, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw FormatError("record is not a JSON object", line_no);
    return sample_from_json(obj);
}

json to_json(const AnnotationValue& value) {
    return std::visit([](const auto& v) { return json(v); }, value);
}

nlohmann::ordered_json sample_to_json(const DataSample& s) {
    nlohmann::ordered_json out;
    out["id"] = s.id;
    out["lang"] = language_code(s.lang);
    out["kind"] = kind_name(s.kind);
    if (s.question) out["question"] = *s.question;
    if (s.options) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& opt : *s.options) {
            nlohmann::ordered_json o;
            o["label"] = opt.label;
            o["text"] = opt.text;
            arr.push_back(std::move(o));
        }
        out["options"] = std::move(arr);
    }
    if (s.rationale) out["rationale"] = *s.rationale;
    if (s.answer) out["answer"] = *s.answer;
    if (s.raw_text) out["raw_text"] = *s.raw_text;
    out["source"] = s.source;
    if (!s.annotations.empty()) {
        nlohmann::ordered_json ann = nlohmann::ordered_json::object();
        for (const auto& [key, value] : s.annotations) {
            ann[key] = std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, value);
        }
        out["annotations"] = std::move(ann);
    }
    for (const auto& [key, value] : s.extra_fields) {
        out[key] = nlohmann::ordered_json::parse(value.dump());
    }
    return out;
}

std::string serialize_sample(const DataSample& s) {
    return sample_to_json(s).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::strict);
}

std::string filter_text(const DataSample& s) {
    if (s.kind == SampleKind::kRawText) return s.raw_text.value_or("");
    std::string text = s.question.value_or("");
    text += ' ';
    text += s.answer.value_or("");
    return text;
}

void annotate(DataSample& s, std::string key, AnnotationValue value) {
    s.annotations.insert_or_assign(std::move(key), std::move(value));
}

std::optional<double> annotation_number(const DataSample& s, std::string_view key) {
    auto it = s.annotations.find(key);
    if (it == s.annotations.end()) return std::nullopt;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
    return std::nullopt;
}

std::optional<std::string> annotation_string(const DataSample& s, std::string_view key) {
    auto it = s.annotations.find(key);
    if (it == s.annotations.end()) return std::nullopt;
    if (const auto* str = std::get_if<std::string>(&it->second)) return *str;
    return std::nullopt;
}

}  // namespace mifc
