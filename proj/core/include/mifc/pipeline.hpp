#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mifc/config.hpp"
#include "mifc/judging.hpp"
#include "mifc/llm_client.hpp"
#include "mifc/metrics.hpp"
#include "mifc/sample.hpp"

namespace mifc {

/// Ten equal-width bins over [0, 1]; 1.0 lands in the last bin.
struct Histogram {
    std::array<std::size_t, 10> counts{};
    void add(double value);
};

/// Counters written to `<out>.report.json` by every stage.
struct StageReport {
    std::string stage;
    std::size_t inputs = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    /// Stage-specific counters: rejection reasons, re-prompts, pairs, ...
    std::map<std::string, std::size_t> counters;
    std::map<std::string, Histogram> histograms;

    nlohmann::ordered_json to_json() const;
};

struct StageOutput {
    std::vector<DataSample> accepted;
    std::vector<DataSample> rejected;
    StageReport report;
};

/// Replaces each short answer's keyword answer with the model's expansion.
/// The keywords are kept under `expand.original`. Samples that are not
/// short-answer QA, have an empty answer, or fail at the provider go to
/// `rejected` with `expand.reason` and `expand.error`.
StageOutput expand_answers(std::vector<DataSample> samples, const PipelineConfig& cfg, ChatProvider& generator);

/// Sends a generated pair (or a single QA block) to every judge and aggregates.
/// A judge whose reply cannot be parsed scores 0 on every criterion.
struct JudgeOutcome {
    JudgeVerdict verdict;
    std::vector<bool> parse_failed;
};

JudgeOutcome run_judges(std::string_view lang_name, std::string_view context, std::string_view qa_text,
                        const PipelineConfig& cfg, std::span<ChatProvider* const> judges);

/// Two-step generation: condense the raw text, generate one MC and one short
/// answer question from the condensed text, then judge the pair against the
/// condensed text. A format violation in either step is re-prompted once.
///
/// Accepted pairs become two samples, `<id>.mc` and `<id>.sa`. Pairs the judges
/// reject become the same two samples in `rejected`; inputs that never yield a
/// pair go to `rejected` as they are, with `gen.reason` and `gen.error`.
StageOutput generate_qa(std::vector<DataSample> raw, const PipelineConfig& cfg, ChatProvider& generator,
                        std::span<ChatProvider* const> judges);

/// Judges existing QA samples one by one. The context is the `gen.context`
/// annotation when present, else the rationale, else empty.
StageOutput judge_samples(std::vector<DataSample> samples, const PipelineConfig& cfg,
                          std::span<ChatProvider* const> judges);

struct FieldTranslation {
    /// "raw_text", "question", "options.A", "rationale" or "answer"
    std::string field;
    std::string source;
    std::string forward;
    std::string back;
    CctsBreakdown scores;
};

struct TranslationRecord {
    DataSample source;
    Language source_lang = Language::kEN;
    Language target_lang = Language::kEN;
    std::vector<FieldTranslation> fields;
    /// Index into `fields` of the lowest-scoring field; it decides the gate.
    std::size_t weakest = 0;
    double bleu_mean = 0.0;
    double embed_score = 0.0;
    double ccts = 0.0;
    bool accepted = false;
};

struct TranslateOutput {
    std::vector<TranslationRecord> records;  // every sample that reached scoring
    std::vector<DataSample> accepted;        // forward translations, target language
    std::vector<DataSample> rejected;        // source samples with the reason
    StageReport report;
};

/// Text fields of a sample that get translated, in a fixed order. MC answer
/// labels are not translated.
std::vector<std::pair<std::string, std::string>> translatable_fields(const DataSample& sample);

/// Round-trips every translatable field through the generator and scores
/// each with CCTS against the original. The sample score is the minimum over
/// fields, and the sample is accepted iff that exceeds cfg.ccts.accept_threshold.
TranslateOutput translate_with_gate(std::vector<DataSample> samples, Language target, const PipelineConfig& cfg,
                                    ChatProvider& translator, const EmbeddingProvider& embedding);

/// Recomputes a translated sample's gate decision from its annotations alone.
/// Returns the recorded and recomputed CCTS.
struct GateRecheck {
    double recorded = 0.0;
    double recomputed = 0.0;
    bool recorded_accepted = false;
    bool recomputed_accepted = false;
};
GateRecheck recheck_translation(const DataSample& translated, const EmbeddingProvider& embedding);

}  // namespace mifc
