#include <gtest/gtest.h>

#include "mifc/digest.hpp"
#include "mifc/error.hpp"
#include "mifc/llm_client.hpp"
#include "mifc/prompts.hpp"

namespace mifc {
namespace {

using Names = std::vector<std::string>;

TEST(Prompts, PlaceholdersPerTemplate) {
    EXPECT_EQ(placeholders(builtin_template(PromptId::kExpandAnswer).body), (Names{"LANG", "question", "answer_keywords"}));
    EXPECT_EQ(placeholders(builtin_template(PromptId::kCondense).body), (Names{"LANG", "original_text"}));
    EXPECT_EQ(placeholders(builtin_template(PromptId::kGenQa).body), (Names{"LANG", "condensed_text"}));
    EXPECT_EQ(placeholders(builtin_template(PromptId::kJudgeQa).body), (Names{"LANG", "condensed_text", "qa_pair"}));
    EXPECT_EQ(placeholders(builtin_template(PromptId::kTranslate).body),
              (Names{"source_lang", "target_lang", "original_text"}));
}

TEST(Prompts, VerbatimWordingIsKept) {
    const auto condense = builtin_template(PromptId::kCondense).body;
    EXPECT_EQ(condense.rfind("You’re an experienced {LANG} doctor, I have some medical texts in {LANG}", 0), 0u);
    const auto judge = builtin_template(PromptId::kJudgeQa).body;
    EXPECT_NE(judge.find("knowledgable"), std::string_view::npos);
    EXPECT_NE(judge.find("CONTINOUS"), std::string_view::npos);
    EXPECT_NE(judge.find("{'logically consistent':0.9, 'factually accurate':0.85, 'sound reasoning':1.0}"),
              std::string_view::npos);
    EXPECT_NE(judge.find("User Input: ###Context: {condensed_text}###Input: {qa_pair}"), std::string_view::npos);
    const auto gen = builtin_template(PromptId::kGenQa).body;
    EXPECT_NE(gen.find(R"('###Question: your generated question\n\n###Options: A. optionA, B. optionB, C. optionC, D. optionD\n\n###Rationale: your explanation\n\n###Answer: correct answer index')"),
              std::string_view::npos);
    const auto expand = builtin_template(PromptId::kExpandAnswer).body;
    EXPECT_NE(expand.find("Your answer MUST based on the keywords, no new stuff should be present."),
              std::string_view::npos);
}

TEST(Prompts, TemplateDigestsAreFrozen) {
    EXPECT_EQ(sha256_hex(builtin_template(PromptId::kExpandAnswer).body),
              "bc6bf921cb628daca8cb4b142702f84ec4d691a7e3e85ba15cba5bb5cc6440f2");
    EXPECT_EQ(sha256_hex(builtin_template(PromptId::kCondense).body),
              "8c570c64edb48c7a4a3151e37045eac055b12fce1b27356800aea0c06945fbb7");
    EXPECT_EQ(sha256_hex(builtin_template(PromptId::kGenQa).body),
              "64871b26d52e7d3f692e22eeb909d7be42f105ab8d82cc10caf626201bbe3fd7");
    EXPECT_EQ(sha256_hex(builtin_template(PromptId::kJudgeQa).body),
              "2b180d3cc4f3ddfd75525a126c4f19de7f1045fec7b36823a15f2ecf95df27c4");
}

TEST(Prompts, RenderSubstitutesOnce) {
    const PromptTemplate t{PromptId::kCondense, "{a} and {b} {a}"};
    EXPECT_EQ(render(t, {{"a", "{b}"}, {"b", "x"}}), "{b} and x {b}");
}

TEST(Prompts, UnboundPlaceholderIsRenderError) {
    try {
        render(builtin_template(PromptId::kCondense), {{"LANG", "English"}});
        FAIL();
    } catch (const RenderError& e) {
        EXPECT_EQ(e.placeholder(), "original_text");
    }
}

TEST(Prompts, RolesSplitAtUserInput) {
    const auto r = render_roles(builtin_template(PromptId::kCondense),
                                {{"LANG", "French"}, {"original_text", "User Input: trick"}});
    EXPECT_EQ(r.user, "###Input: User Input: trick");
    EXPECT_EQ(r.system.rfind("You’re an experienced French doctor", 0), 0u);
    EXPECT_EQ(r.system.find("User Input"), std::string::npos);
}

TEST(Prompts, IdsRoundTrip) {
    for (PromptId id : {PromptId::kCondense, PromptId::kGenQa, PromptId::kExpandAnswer, PromptId::kJudgeQa,
                        PromptId::kTranslate}) {
        EXPECT_EQ(parse_prompt_id(prompt_id_name(id)), id);
    }
}

TEST(Prompts, MakeRequestCarriesTemperatureAndVariant) {
    const auto req = make_request(PromptId::kJudgeQa, {{"LANG", "Korean"}, {"condensed_text", "c"}, {"qa_pair", "q"}},
                                  0.0, 1);
    EXPECT_EQ(req.user, "###Context: c###Input: q");
    EXPECT_EQ(req.variant, 1);
}

}  // namespace
}  // namespace mifc
