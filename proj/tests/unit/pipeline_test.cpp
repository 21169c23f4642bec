#include <gtest/gtest.h>

#include "fake_llm.hpp"
#include "mifc/config.hpp"
#include "mifc/error.hpp"
#include "mifc/jsonl_io.hpp"
#include "mifc/pipeline.hpp"
#include "mifc/replay.hpp"

namespace mifc {
namespace {

using testing::FakeLlm;

DataSample raw(std::string id, std::string text, Language lang = Language::kEN) {
    DataSample s;
    s.id = std::move(id);
    s.lang = lang;
    s.kind = SampleKind::kRawText;
    s.raw_text = std::move(text);
    s.source = "unit";
    return s;
}

DataSample short_qa(std::string id, std::string q, std::string a) {
    DataSample s;
    s.id = std::move(id);
    s.kind = SampleKind::kShortAnswerQa;
    s.question = std::move(q);
    s.answer = std::move(a);
    s.source = "unit";
    return s;
}

struct Fixture {
    PipelineConfig cfg = PipelineConfig::defaults();
    FakeLlm generator{"gpt-4o-mini"};
    FakeLlm judge_a{"gpt-4"};
    FakeLlm judge_b{"claude-3-5-sonnet"};
    std::vector<ChatProvider*> judges{&judge_a, &judge_b};
    DeterministicEmbeddingProvider embedding;
};

const char* kText =
    "Insulin is a hormone made by the pancreas [1]. It lowers blood glucose by moving sugar into cells.";

TEST(Pipeline, GenerateProducesMcAndShortAnswer) {
    Fixture f;
    const auto out = generate_qa({raw("r1", kText)}, f.cfg, f.generator, f.judges);
    ASSERT_EQ(out.accepted.size(), 2u);
    const auto& mc = out.accepted[0];
    const auto& sa = out.accepted[1];
    EXPECT_EQ(mc.id, "r1.mc");
    EXPECT_EQ(sa.id, "r1.sa");
    EXPECT_EQ(mc.kind, SampleKind::kMultipleChoiceQa);
    EXPECT_EQ(mc.options->size(), 4u);
    EXPECT_EQ(sa.answer, "It lowers blood glucose by moving sugar into cells.");
    EXPECT_EQ(annotation_string(mc, "gen.parent"), "r1");
    EXPECT_EQ(annotation_string(mc, "gen.context"),
              "Insulin is a hormone made by the pancreas. It lowers blood glucose by moving sugar into cells.");
    EXPECT_DOUBLE_EQ(*annotation_number(mc, "gen.judge.logically_consistent"), 0.9);
    EXPECT_EQ(out.report.counters.at("pairs_accepted"), 1u);
    EXPECT_EQ(out.report.counters.at("reprompts"), 0u);
}

TEST(Pipeline, FormatViolationIsRepromptedOnce) {
    Fixture f;
    const auto out = generate_qa({raw("r1", std::string(kText) + " BADFMT")}, f.cfg, f.generator, f.judges);
    EXPECT_EQ(out.accepted.size(), 2u);
    // One re-prompt each for the condense and generation steps.
    EXPECT_EQ(out.report.counters.at("reprompts"), 2u);
}

TEST(Pipeline, PersistentFormatViolationRejectsInput) {
    Fixture f;
    const auto out = generate_qa({raw("r1", std::string(kText) + " ALWAYSBAD")}, f.cfg, f.generator, f.judges);
    ASSERT_EQ(out.rejected.size(), 1u);
    EXPECT_EQ(out.rejected[0].id, "r1");
    EXPECT_EQ(annotation_string(out.rejected[0], "gen.reason"), "parse");
    EXPECT_EQ(out.report.counters.at("inputs_failed"), 1u);
}

TEST(Pipeline, LowJudgeScoreRejectsPair) {
    Fixture f;
    const auto out = generate_qa({raw("r1", std::string(kText) + " LOWQ")}, f.cfg, f.generator, f.judges);
    EXPECT_TRUE(out.accepted.empty());
    ASSERT_EQ(out.rejected.size(), 2u);
    EXPECT_EQ(annotation_string(out.rejected[0], "gen.reason"), "judge");
    EXPECT_EQ(out.report.counters.at("pairs_rejected"), 1u);
}

TEST(Pipeline, EveryInputIsAccountedFor) {
    Fixture f;
    std::vector<DataSample> in;
    for (int i = 0; i < 20; ++i) {
        std::string text = kText;
        if (i % 5 == 1) text += " LOWQ";
        if (i % 5 == 2) text += " ALWAYSBAD";
        if (i % 5 == 3) text += " BADFMT";
        in.push_back(raw("r" + std::to_string(i), text));
    }
    const auto out = generate_qa(in, f.cfg, f.generator, f.judges);
    const auto& c = out.report.counters;
    EXPECT_EQ(c.at("pairs_generated") + c.at("inputs_failed"), in.size());
    EXPECT_EQ(out.accepted.size() + out.rejected.size(), 2 * c.at("pairs_generated") + c.at("inputs_failed"));
    EXPECT_EQ(out.accepted.size(), 24u);
}

TEST(Pipeline, JudgeCountMustMatchConfig) {
    Fixture f;
    std::vector<ChatProvider*> one{&f.judge_a};
    const auto out = generate_qa({raw("r1", kText)}, f.cfg, f.generator, one);
    ASSERT_EQ(out.rejected.size(), 1u);
    EXPECT_EQ(annotation_string(out.rejected[0], "gen.reason"), "config");
}

TEST(Pipeline, ExpandKeepsOriginalKeywords) {
    Fixture f;
    std::vector<DataSample> in{short_qa("s1", "What lowers glucose?", "insulin; cell uptake"),
                               short_qa("s2", "Empty?", " ")};
    const auto out = expand_answers(in, f.cfg, f.generator);
    ASSERT_EQ(out.accepted.size(), 1u);
    EXPECT_EQ(out.accepted[0].answer, "In short, the key points are insulin; cell uptake.");
    EXPECT_EQ(annotation_string(out.accepted[0], "expand.original"), "insulin; cell uptake");
    ASSERT_EQ(out.rejected.size(), 1u);
    EXPECT_EQ(annotation_string(out.rejected[0], "expand.reason"), "validation");
}

TEST(Pipeline, JudgeSamplesUsesGeneratedContext) {
    Fixture f;
    auto gen = generate_qa({raw("r1", kText)}, f.cfg, f.generator, f.judges);
    const auto out = judge_samples(gen.accepted, f.cfg, f.judges);
    EXPECT_EQ(out.accepted.size(), 2u);
    EXPECT_EQ(annotation_number(out.accepted[0], "judge.sound_reasoning"), 1.0);
}

TEST(Pipeline, IdentityTranslationPassesGate) {
    Fixture f;
    const auto out = translate_with_gate({raw("r1", kText)}, Language::kKO, f.cfg, f.generator, f.embedding);
    ASSERT_EQ(out.accepted.size(), 1u);
    const auto& t = out.accepted[0];
    EXPECT_EQ(t.id, "r1.ko");
    EXPECT_EQ(t.lang, Language::kKO);
    EXPECT_EQ(t.raw_text, std::string("<KO> ") + kText);
    EXPECT_NEAR(*annotation_number(t, "ccts.score"), 1.0, 1e-9);
    EXPECT_EQ(annotation_string(t, "translate.source_id"), "r1");
}

TEST(Pipeline, DriftingFieldFailsGate) {
    Fixture f;
    auto gen = generate_qa({raw("r1", kText)}, f.cfg, f.generator, f.judges);
    DataSample mc = gen.accepted[0];
    mc.rationale = "Rationale that DRIFT s away on the round trip.";
    const auto out = translate_with_gate({gen.accepted[1], mc}, Language::kFR, f.cfg, f.generator, f.embedding);
    ASSERT_EQ(out.accepted.size(), 1u);
    ASSERT_EQ(out.rejected.size(), 1u);
    EXPECT_EQ(out.rejected[0].id, "r1.mc");
    EXPECT_EQ(annotation_string(out.rejected[0], "translate.reason"), "gate");
    EXPECT_EQ(annotation_string(out.rejected[0], "ccts.weakest_field"), "rationale");
    EXPECT_LT(*annotation_number(out.rejected[0], "ccts.score"), 0.8);
}

TEST(Pipeline, GateRecheckMatchesRecordedScore) {
    Fixture f;
    auto gen = generate_qa({raw("r1", kText), raw("r2", std::string(kText) + " DRIFT")}, f.cfg, f.generator,
                           f.judges);
    const auto out = translate_with_gate(gen.accepted, Language::kZH, f.cfg, f.generator, f.embedding);
    std::vector<DataSample> all = out.accepted;
    all.insert(all.end(), out.rejected.begin(), out.rejected.end());
    ASSERT_EQ(all.size(), 4u);
    for (const auto& s : all) {
        const auto r = recheck_translation(s, f.embedding);
        EXPECT_DOUBLE_EQ(r.recorded, r.recomputed) << s.id;
        EXPECT_EQ(r.recorded_accepted, r.recomputed_accepted) << s.id;
    }
}

TEST(Pipeline, SameTargetLanguageIsRejected) {
    Fixture f;
    const auto out = translate_with_gate({raw("r1", kText)}, Language::kEN, f.cfg, f.generator, f.embedding);
    ASSERT_EQ(out.rejected.size(), 1u);
    EXPECT_EQ(annotation_string(out.rejected[0], "translate.reason"), "validation");
}

TEST(Pipeline, OutputIsIndependentOfConcurrency) {
    std::vector<DataSample> in;
    for (int i = 0; i < 12; ++i) in.push_back(raw("r" + std::to_string(i), kText + std::string(i, '!')));
    Fixture a;
    a.cfg.concurrency_limit = 1;
    Fixture b;
    b.cfg.concurrency_limit = 8;
    const auto x = generate_qa(in, a.cfg, a.generator, a.judges);
    const auto y = generate_qa(in, b.cfg, b.generator, b.judges);
    EXPECT_EQ(x.accepted, y.accepted);
    EXPECT_EQ(x.rejected, y.rejected);
}

TEST(Pipeline, FiftySampleGateDecisionsRecompute) {
    Fixture f;
    std::vector<DataSample> in;
    for (int i = 0; i < 50; ++i) {
        std::string text = "Sample " + std::to_string(i) + " explains that " + kText;
        if (i % 7 == 0) text += " DRIFT";
        in.push_back(raw("en" + std::to_string(i), text));
    }
    const auto out = translate_with_gate(in, Language::kKO, f.cfg, f.generator, f.embedding);
    ASSERT_EQ(out.records.size(), 50u);
    EXPECT_EQ(out.rejected.size(), 8u);
    for (const auto& r : out.records) {
        const auto& w = r.fields[r.weakest];
        const auto again = ccts(w.source, w.back, f.cfg.ccts, f.embedding);
        EXPECT_DOUBLE_EQ(again, r.ccts);
        EXPECT_EQ(r.accepted, again > 0.8);
        EXPECT_NEAR(r.ccts, 0.5 * r.bleu_mean + 0.5 * r.embed_score, 1e-9);
    }
}

TEST(Pipeline, ReplayedExpansionIsByteIdentical) {
    std::vector<DataSample> in;
    for (int i = 0; i < 20; ++i) {
        DataSample s = short_qa("zh" + std::to_string(i), "胰岛素的作用是什么？" + std::to_string(i), "降低血糖；促进摄取");
        s.lang = Language::kZH;
        in.push_back(s);
    }
    Fixture f;
    auto store = std::make_shared<ReplayStore>();
    RecordingProvider recorder(std::make_shared<FakeLlm>("gpt-4o-mini"), store);
    const auto live = expand_answers(in, f.cfg, recorder);
    ASSERT_EQ(live.accepted.size(), 20u);

    auto replayed = [&] {
        ReplayProvider replay(store, "gpt-4o-mini");
        return serialize_samples(expand_answers(in, f.cfg, replay).accepted);
    };
    const std::string first = replayed();
    EXPECT_EQ(first, replayed());
    EXPECT_EQ(first, serialize_samples(live.accepted));
}

TEST(Pipeline, ReportJsonHasRate) {
    StageReport r;
    r.stage = "x";
    r.accepted = 3;
    r.rejected = 1;
    r.histograms["h"].add(1.0);
    const auto j = r.to_json();
    EXPECT_EQ(j["acceptance_rate"], 0.75);
    EXPECT_EQ(j["histograms"]["h"]["counts"][9], 1);
}

}  // namespace
}  // namespace mifc
