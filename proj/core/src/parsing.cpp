#include "mifc/parsing.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include <nlohmann/json.hpp>

#include "mifc/error.hpp"
#include "mifc/utf8.hpp"

namespace mifc {
namespace {

using json = nlohmann::json;

constexpr std::string_view kCleanedMarker = "###Cleaned Text:";
constexpr std::string_view kSeparator = "[SEP]";

void require_utf8(std::string_view response) {
    if (!utf8::is_valid(response)) throw ParseError("", "response is not valid UTF-8");
}

struct Marker {
    std::string_view name;  // e.g. "###Answer"
    std::string_view token; // e.g. "###Answer:"
};

constexpr std::array<Marker, 4> kMarkers = {{
    {"###Question", "###Question:"},
    {"###Options", "###Options:"},
    {"###Rationale", "###Rationale:"},
    {"###Answer", "###Answer:"},
}};

using Fields = std::array<std::optional<std::string>, kMarkers.size()>;

std::string trimmed(std::string_view s) { return std::string(utf8::trim(s)); }

// Splits one block into marker fields. Text before the first marker is
// ignored; each field runs to the next known marker.
Fields split_fields(std::string_view block) {
    struct Hit {
        std::size_t pos;
        std::size_t marker;
    };
    std::vector<Hit> hits;
    for (std::size_t m = 0; m < kMarkers.size(); ++m) {
        const auto token = kMarkers[m].token;
        std::size_t pos = block.find(token);
        if (pos == std::string_view::npos) continue;
        if (block.find(token, pos + token.size()) != std::string_view::npos) {
            throw ParseError(std::string(kMarkers[m].name), "duplicate marker");
        }
        hits.push_back({pos, m});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.pos < b.pos; });
    Fields fields;
    for (std::size_t h = 0; h < hits.size(); ++h) {
        const std::size_t begin = hits[h].pos + kMarkers[hits[h].marker].token.size();
        const std::size_t end = h + 1 < hits.size() ? hits[h + 1].pos : block.size();
        fields[hits[h].marker] = trimmed(block.substr(begin, end - begin));
    }
    return fields;
}

const std::string& require_field(const Fields& fields, std::size_t m) {
    if (!fields[m]) throw ParseError(std::string(kMarkers[m].name), "missing marker");
    return *fields[m];
}

bool is_label_punct(char c) { return c == '.' || c == ')'; }

// Candidate start of label `L` at position i: "L." or "L)".
bool label_at(std::string_view s, std::size_t i, char label) {
    return i + 1 < s.size() && s[i] == label && is_label_punct(s[i + 1]);
}

// Separator strength in front of position i: 2 after a comma, semicolon or
// newline (spaces skipped), 1 after plain whitespace, 0 otherwise.
int boundary_strength(std::string_view s, std::size_t i) {
    if (i == 0) return 2;
    std::size_t j = i;
    bool saw_space = false;
    while (j > 0 && (s[j - 1] == ' ' || s[j - 1] == '\t' || s[j - 1] == '\r')) {
        --j;
        saw_space = true;
    }
    if (j == 0) return 2;
    const char prev = s[j - 1];
    if (prev == ',' || prev == ';' || prev == '\n') return 2;
    return saw_space ? 1 : 0;
}

std::optional<std::size_t> find_label(std::string_view s, std::size_t from, char label) {
    std::optional<std::size_t> weak;
    for (std::size_t i = from; i < s.size(); ++i) {
        if (!label_at(s, i, label)) continue;
        const int strength = boundary_strength(s, i);
        if (strength == 2) return i;
        if (strength == 1 && !weak) weak = i;
    }
    return weak;
}

std::string strip_option_tail(std::string_view text) {
    std::string_view t = utf8::trim(text);
    while (!t.empty() && (t.back() == ',' || t.back() == ';')) {
        t.remove_suffix(1);
        t = utf8::trim(t);
    }
    return std::string(t);
}

std::vector<McOption> parse_options(std::string_view text) {
    constexpr std::array<char, 4> kLabels = {'A', 'B', 'C', 'D'};
    std::array<std::size_t, 4> starts{};
    std::size_t from = 0;
    for (std::size_t k = 0; k < kLabels.size(); ++k) {
        auto pos = find_label(text, from, kLabels[k]);
        if (!pos || (k == 0 && *pos != 0)) {
            throw ParseError("###Options", std::string("option ") + kLabels[k] + " not found");
        }
        starts[k] = *pos;
        from = *pos + 2;
    }
    if (auto extra = find_label(text, from, 'E'); extra && boundary_strength(text, *extra) == 2) {
        throw ValidationError("options", "more than four options");
    }
    std::vector<McOption> options;
    for (std::size_t k = 0; k < kLabels.size(); ++k) {
        const std::size_t begin = starts[k] + 2;
        const std::size_t end = k + 1 < kLabels.size() ? starts[k + 1] : text.size();
        std::string option_text = strip_option_tail(text.substr(begin, end - begin));
        if (option_text.empty()) {
            throw ValidationError("options", std::string("option ") + kLabels[k] + " is empty");
        }
        options.push_back({std::string(1, kLabels[k]), std::move(option_text)});
    }
    return options;
}

std::string normalize_answer(std::string_view raw, const std::vector<McOption>& options) {
    std::string_view a = utf8::trim(raw);
    while (!a.empty() && (a.front() == '(' || a.front() == '[')) a.remove_prefix(1);
    if (a.empty()) throw ValidationError("answer", "empty answer");
    const char first = a.front();
    const bool letter = (first >= 'A' && first <= 'Z') || (first >= 'a' && first <= 'z');
    const bool label_shaped =
        letter && (a.size() == 1 || a[1] == '.' || a[1] == ')' || a[1] == ']' || a[1] == ':' || a[1] == ' ');
    if (label_shaped) {
        const char upper = static_cast<char>(first >= 'a' ? first - 32 : first);
        if (upper >= 'A' && upper <= 'D') return std::string(1, upper);
        throw ValidationError("answer", std::string("answer index '") + upper + "' outside A-D");
    }
    for (const auto& opt : options) {
        if (opt.text == a) return opt.label;
    }
    throw ValidationError("answer", "answer '" + std::string(a) + "' is not an option label A-D");
}

std::string_view unquote_block(std::string_view block) {
    block = utf8::trim(block);
    if (block.size() >= 2 && block.front() == '\'' && block.back() == '\'') {
        block = block.substr(1, block.size() - 2);
    }
    return block;
}

// Models sometimes echo the format's escaped newlines literally.
std::string unescape_newlines(std::string_view response) {
    if (response.find('\n') != std::string_view::npos) return std::string(response);
    std::string out;
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (response[i] == '\\' && i + 1 < response.size() && response[i + 1] == 'n') {
            out.push_back('\n');
            ++i;
        } else {
            out.push_back(response[i]);
        }
    }
    return out;
}

McQuestion parse_mc_block(std::string_view block) {
    const Fields f = split_fields(unquote_block(block));
    McQuestion mc;
    mc.question = require_field(f, 0);
    const std::string& options = require_field(f, 1);
    mc.rationale = require_field(f, 2);
    const std::string& answer = require_field(f, 3);
    if (mc.question.empty()) throw ValidationError("question", "multiple-choice question is empty");
    mc.options = parse_options(options);
    mc.answer = normalize_answer(answer, mc.options);
    return mc;
}

ShortAnswerQuestion parse_short_block(std::string_view block) {
    const Fields f = split_fields(unquote_block(block));
    if (f[1]) throw ParseError("###Options", "options in the short-answer block");
    ShortAnswerQuestion sa;
    sa.question = require_field(f, 0);
    sa.answer = require_field(f, 3);
    if (sa.question.empty()) throw ValidationError("question", "short-answer question is empty");
    if (sa.answer.empty()) throw ValidationError("answer", "short answer is empty");
    return sa;
}

// Rewrites single-quoted strings as JSON strings.
std::string normalize_single_quotes(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '"') {
            // Copy a double-quoted string verbatim.
            out.push_back(c);
            ++i;
            while (i < text.size()) {
                out.push_back(text[i]);
                if (text[i] == '\\' && i + 1 < text.size()) {
                    out.push_back(text[i + 1]);
                    i += 2;
                    continue;
                }
                if (text[i++] == '"') break;
            }
        } else if (c == '\'') {
            out.push_back('"');
            ++i;
            while (i < text.size() && text[i] != '\'') {
                if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == '\'') {
                    out.push_back('\'');
                    i += 2;
                    continue;
                }
                if (text[i] == '"') out.push_back('\\');
                out.push_back(text[i]);
                ++i;
            }
            out.push_back('"');
            if (i < text.size()) ++i;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

// End (exclusive) of the balanced {...} starting at `start`, honouring both
// quote styles.
std::optional<std::size_t> balanced_object_end(std::string_view s, std::size_t start) {
    int depth = 0;
    char quote = 0;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == '\\') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::nullopt;
}

std::optional<json> first_json_object(std::string_view response) {
    for (std::size_t start = response.find('{'); start != std::string_view::npos;
         start = response.find('{', start + 1)) {
        const auto end = balanced_object_end(response, start);
        if (!end) continue;
        const std::string_view candidate = response.substr(start, *end - start);
        json j = json::parse(candidate, nullptr, false);
        if (j.is_discarded()) j = json::parse(normalize_single_quotes(candidate), nullptr, false);
        if (!j.is_discarded() && j.is_object()) return j;
    }
    return std::nullopt;
}

double read_criterion(const json& obj, std::string_view name) {
    std::string underscored(name);
    std::replace(underscored.begin(), underscored.end(), ' ', '_');
    auto it = obj.find(std::string(name));
    if (it == obj.end()) it = obj.find(underscored);
    if (it == obj.end()) throw ParseError(std::string(name), "judge response is missing a criterion");
    if (!it->is_number()) throw ParseError(std::string(name), "criterion value is not a number");
    const double v = it->get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError(std::string(name), "score " + it->dump() + " outside [0, 1]");
    }
    return v;
}

}  // namespace

CondensedText parse_condensed(std::string_view response) {
    require_utf8(response);
    const std::string_view body = utf8::trim(response);
    if (body.empty()) throw ParseError("", "empty condense response");
    const auto pos = body.find(kCleanedMarker);
    if (pos == std::string_view::npos) return {std::string(body), true};
    std::string text = trimmed(body.substr(pos + kCleanedMarker.size()));
    if (text.empty()) throw ParseError(std::string(kCleanedMarker), "marker is followed by no text");
    return {std::move(text), false};
}

GeneratedPair parse_generated_pair(std::string_view response) {
    require_utf8(response);
    const std::string text = unescape_newlines(response);
    const std::string_view view = text;
    const auto sep = view.find(kSeparator);
    if (sep == std::string_view::npos) throw ParseError(std::string(kSeparator), "missing separator");
    const std::string_view rest = view.substr(sep + kSeparator.size());
    if (rest.find(kSeparator) != std::string_view::npos) {
        throw ParseError(std::string(kSeparator), "more than one separator");
    }
    GeneratedPair pair;
    pair.mc = parse_mc_block(view.substr(0, sep));
    pair.short_answer = parse_short_block(rest);
    return pair;
}

std::string render_mc_block(const McQuestion& mc) {
    std::string out = "###Question: " + mc.question + "\n\n###Options: ";
    for (std::size_t i = 0; i < mc.options.size(); ++i) {
        if (i > 0) out += ", ";
        out += mc.options[i].label + ". " + mc.options[i].text;
    }
    out += "\n\n###Rationale: " + mc.rationale + "\n\n###Answer: " + mc.answer;
    return out;
}

std::string render_short_block(const ShortAnswerQuestion& sa) {
    return "###Question: " + sa.question + "\n\n###Answer: " + sa.answer;
}

std::string render_generated_pair(const GeneratedPair& pair) {
    return render_mc_block(pair.mc) + "\n[SEP]\n" + render_short_block(pair.short_answer);
}

JudgeScores parse_judge(std::string_view response) {
    require_utf8(response);
    const auto obj = first_json_object(response);
    if (!obj) throw ParseError("{", "no JSON object found in judge response");
    JudgeScores scores;
    scores.logically_consistent = read_criterion(*obj, kCriterionLogic);
    scores.factually_accurate = read_criterion(*obj, kCriterionFact);
    scores.sound_reasoning = read_criterion(*obj, kCriterionReasoning);
    return scores;
}

}  // namespace mifc
