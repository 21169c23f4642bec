#include "mifc/prompts.hpp"

#include <algorithm>

#include "mifc/error.hpp"

namespace mifc {
namespace {

constexpr std::string_view kExpandAnswer =
    R"PROMPT(You are an experienced {LANG} doctor who is tasked with answering general medical questions. Here are some detailed requirements:

1. I have the answer keywords for each question. I want you to expand and write complete sentences based on the question, and answer keywords provided.

2. Your answer MUST based on the keywords, no new stuff should be present. Give me the complete answer directly in {LANG}.

User Input: ###Question: {question}, ###Answer Keywords: {answer_keywords})PROMPT";

constexpr std::string_view kCondense =
    R"PROMPT(You’re an experienced {LANG} doctor, I have some medical texts in {LANG} that were extracted from several websites. Your task is to clean the texts and make them easy to read. Here are some detailed requirements:

1. You must ignore all links, references, and unknown characters. You MUST KEEP ALL MEDICAL-RELATED CONTENT in the texts.

2. Give the cleaned text directly without any other unnecessary words following the format of ###Cleaned Text: you cleaned text.

User Input: ###Input: {original_text})PROMPT";

constexpr std::string_view kGenQa =
    R"PROMPT(You’re a {LANG} medical expert tasked with creating medical questions and answers based on the short article provided. Here are the requirements:

1. For each article you read, you MUST create two types of questions: multiple-choice and short answers. One question for each type.

2. For the multiple-choice question, you MUST generate the answer choice in the following format: '###Question: your generated question\n\n###Options: A. optionA, B. optionB, C. optionC, D. optionD\n\n###Rationale: your explanation\n\n###Answer: correct answer index'

3. For the short answer question, You MUST use this format instead: '###Question: your generated question\n\n###Answer: your detailed answer and explanation'.

4. Multiple Choice and Short Answer questions you provided should in DIFFERENT TOPICS.

5. You MUST separate two questions by the separation symbol [SEP]. Complete the multiple-choice question first, and then switch to the short answer question.

6. You MUST strictly follow the above instructions, with NO OTHER UNNECESSARY WORDS in the output.

User Input: ###Input: {condensed_text})PROMPT";

constexpr std::string_view kJudgeQa =
    R"PROMPT(You are an experienced and knowledgable {LANG} medical school professor. You are given a short text paired with a question-answer pair that is created based on the text. Your task is to verify the correctness of the question-answer pair. Here are some detailed requirements.

1. Based on the text provided, check whether the question-answer pair is logically consistent, factually accurate, and sound reasoning. Assign a CONTINOUS score BETWEEN 0 AND 1 for each of the criteria.

2. Only return a JSON dictionary containing THREE KEY-VALUE pairs. Here is an example that you can refer to: {'logically consistent':0.9, 'factually accurate':0.85, 'sound reasoning':1.0}

User Input: ###Context: {condensed_text}###Input: {qa_pair})PROMPT";

// No published wording exists for the translator; this one mirrors the style
// of the others and asks for bare output.
constexpr std::string_view kTranslate =
    R"PROMPT(You are an experienced medical translator fluent in {source_lang} and {target_lang}. Your task is to translate a medical text from {source_lang} into {target_lang}. Here are some detailed requirements:

1. You MUST KEEP ALL MEDICAL-RELATED CONTENT, including terminology, numbers, and units, without adding or removing information.

2. Give the translated text directly in {target_lang} without any other unnecessary words.

User Input: ###Input: {original_text})PROMPT";

const PromptTemplate kTemplates[] = {
    {PromptId::kCondense, kCondense},
    {PromptId::kGenQa, kGenQa},
    {PromptId::kExpandAnswer, kExpandAnswer},
    {PromptId::kJudgeQa, kJudgeQa},
    {PromptId::kTranslate, kTranslate},
};

bool is_name_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

// Length of the placeholder starting at body[i] == '{', or 0.
std::size_t placeholder_at(std::string_view body, std::size_t i) {
    std::size_t j = i + 1;
    while (j < body.size() && is_name_char(body[j])) ++j;
    if (j == i + 1 || j >= body.size() || body[j] != '}') return 0;
    return j - i + 1;
}

constexpr std::string_view kUserMarker = "User Input: ";

}  // namespace

std::string_view prompt_id_name(PromptId id) {
    switch (id) {
        case PromptId::kCondense: return "condense";
        case PromptId::kGenQa: return "gen_qa";
        case PromptId::kExpandAnswer: return "expand_answer";
        case PromptId::kJudgeQa: return "judge_qa";
        case PromptId::kTranslate: return "translate";
    }
    return "unknown";
}

PromptId parse_prompt_id(std::string_view name) {
    for (const auto& t : kTemplates) {
        if (prompt_id_name(t.id) == name) return t.id;
    }
    throw ConfigError("unknown prompt id '" + std::string(name) + "'");
}

const PromptTemplate& builtin_template(PromptId id) {
    for (const auto& t : kTemplates) {
        if (t.id == id) return t;
    }
    throw ConfigError("no template for prompt id");
}

std::vector<std::string> placeholders(std::string_view body) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        if (const std::size_t len = placeholder_at(body, i)) {
            std::string name(body.substr(i + 1, len - 2));
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
            i += len - 1;
        }
    }
    return out;
}

std::string render(const PromptTemplate& tmpl, const PromptBindings& bindings) {
    const std::string_view body = tmpl.body;
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            if (const std::size_t len = placeholder_at(body, i)) {
                const std::string_view name = body.substr(i + 1, len - 2);
                auto it = bindings.find(name);
                if (it == bindings.end()) throw RenderError(std::string(name));
                out += it->second;
                i += len;
                continue;
            }
        }
        out.push_back(body[i]);
        ++i;
    }
    return out;
}

RenderedPrompt render_roles(const PromptTemplate& tmpl, const PromptBindings& bindings) {
    // Split the template, not the output, so bound text can never move the cut.
    const auto pos = tmpl.body.rfind(kUserMarker);
    if (pos == std::string_view::npos) return {"", render(tmpl, bindings)};
    std::string_view system = tmpl.body.substr(0, pos);
    while (!system.empty() && (system.back() == '\n' || system.back() == ' ')) system.remove_suffix(1);
    const std::string_view user = tmpl.body.substr(pos + kUserMarker.size());
    return {render({tmpl.id, system}, bindings), render({tmpl.id, user}, bindings)};
}

}  // namespace mifc
