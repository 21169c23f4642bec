#include "mifc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "mifc/error.hpp"
#include "mifc/parallel.hpp"
#include "mifc/utf8.hpp"

namespace mifc {

namespace {

struct Failure {
    std::string reason;
    std::string message;
};

Failure classify(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return {to_string(err->kind()), err->what()};
    return {"internal", e.what()};
}

void mark_failure(DataSample& s, const std::string& stage, const Failure& f) {
    annotate(s, stage + ".reason", f.reason);
    annotate(s, stage + ".error", f.message);
}

std::string trimmed(std::string_view text) { return std::string(utf8::trim(text)); }

// Asks once and, on a ParseError or ValidationError from `parse`, once more
// with a bumped variant. Transport errors propagate immediately.
template <class Parse>
auto ask_with_reprompt(ChatProvider& provider, PromptId id, const PromptBindings& bindings, double temperature,
                       Parse parse, std::size_t& reprompts) {
    for (int variant = 0;; ++variant) {
        const ChatExchange ex = provider.complete(make_request(id, bindings, temperature, variant));
        try {
            return parse(ex.response);
        } catch (const ParseError&) {
            if (variant >= 1) throw;
        } catch (const ValidationError&) {
            if (variant >= 1) throw;
        }
        ++reprompts;
    }
}

void annotate_verdict(DataSample& s, const std::string& prefix, const JudgeOutcome& outcome,
                      const PipelineConfig& cfg, std::span<ChatProvider* const> judges) {
    const auto& v = outcome.verdict;
    annotate(s, prefix + ".logically_consistent", v.aggregated.logically_consistent);
    annotate(s, prefix + ".factually_accurate", v.aggregated.factually_accurate);
    annotate(s, prefix + ".sound_reasoning", v.aggregated.sound_reasoning);
    annotate(s, prefix + ".accepted", v.accepted);
    annotate(s, prefix + ".threshold", cfg.judge.per_criterion_threshold);
    annotate(s, prefix + ".aggregation", std::string(aggregation_name(cfg.judge.aggregation)));
    for (std::size_t i = 0; i < v.per_judge.size(); ++i) {
        const std::string jp = prefix + "." + std::to_string(i);
        annotate(s, jp + ".model", judges[i]->model());
        annotate(s, jp + ".logically_consistent", v.per_judge[i].logically_consistent);
        annotate(s, jp + ".factually_accurate", v.per_judge[i].factually_accurate);
        annotate(s, jp + ".sound_reasoning", v.per_judge[i].sound_reasoning);
        if (outcome.parse_failed[i]) annotate(s, jp + ".parse_failed", true);
    }
}

double min_criterion(const JudgeScores& s) {
    return std::min({s.logically_consistent, s.factually_accurate, s.sound_reasoning});
}

void count_outcome(StageReport& report, const std::vector<DataSample>& rejected, const std::string& stage) {
    for (const auto& s : rejected) {
        if (auto reason = annotation_string(s, stage + ".reason")) ++report.counters["rejected." + *reason];
    }
}

}  // namespace

void Histogram::add(double value) {
    if (!std::isfinite(value)) return;
    const double clamped = std::clamp(value, 0.0, 1.0);
    const auto bin = std::min<std::size_t>(counts.size() - 1, static_cast<std::size_t>(clamped * 10.0));
    ++counts[bin];
}

nlohmann::ordered_json StageReport::to_json() const {
    nlohmann::ordered_json j;
    j["stage"] = stage;
    j["inputs"] = inputs;
    j["accepted"] = accepted;
    j["rejected"] = rejected;
    const std::size_t decided = accepted + rejected;
    j["acceptance_rate"] = decided == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(decided);
    j["counters"] = counters;
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [name, h] : histograms) hist[name] = {{"range", {0.0, 1.0}}, {"counts", h.counts}};
    j["histograms"] = hist;
    return j;
}

StageOutput expand_answers(std::vector<DataSample> samples, const PipelineConfig& cfg, ChatProvider& generator) {
    std::vector<std::optional<Failure>> failures(samples.size());
    std::vector<std::size_t> reprompts(samples.size(), 0);
    parallel_for(samples.size(), cfg.concurrency_limit, [&](std::size_t i) {
        DataSample& s = samples[i];
        try {
            if (s.kind != SampleKind::kShortAnswerQa) {
                throw ValidationError("kind", "answer expansion needs short_answer_qa");
            }
            if (!s.answer || utf8::trim(*s.answer).empty()) throw ValidationError("answer", "empty keyword answer");
            const PromptBindings bindings{{"LANG", std::string(language_name(s.lang))},
                                          {"question", *s.question},
                                          {"answer_keywords", *s.answer}};
            std::string expanded = ask_with_reprompt(
                generator, PromptId::kExpandAnswer, bindings, cfg.provider.temperature,
                [](const std::string& response) {
                    std::string text = trimmed(response);
                    if (text.empty()) throw ParseError("response", "empty expansion");
                    return text;
                },
                reprompts[i]);
            annotate(s, "expand.original", *s.answer);
            annotate(s, "expand.prompt", std::string(prompt_id_name(PromptId::kExpandAnswer)));
            annotate(s, "expand.model", generator.model());
            s.answer = std::move(expanded);
        } catch (const std::exception& e) {
            failures[i] = classify(e);
        }
    });

    StageOutput out;
    out.report.stage = "expand";
    out.report.inputs = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.report.counters["reprompts"] += reprompts[i];
        if (failures[i]) {
            mark_failure(samples[i], "expand", *failures[i]);
            out.rejected.push_back(std::move(samples[i]));
        } else {
            out.accepted.push_back(std::move(samples[i]));
        }
    }
    out.report.accepted = out.accepted.size();
    out.report.rejected = out.rejected.size();
    count_outcome(out.report, out.rejected, "expand");
    return out;
}

JudgeOutcome run_judges(std::string_view lang_name, std::string_view context, std::string_view qa_text,
                        const PipelineConfig& cfg, std::span<ChatProvider* const> judges) {
    if (judges.empty()) throw ConfigError("at least one judge is required");
    if (judges.size() != cfg.judge.judges.size()) {
        throw ConfigError("judge providers do not match judge.judges in the config");
    }
    const PromptBindings bindings{{"LANG", std::string(lang_name)},
                                  {"condensed_text", std::string(context)},
                                  {"qa_pair", std::string(qa_text)}};
    JudgeOutcome outcome;
    std::vector<JudgeScores> scores;
    for (std::size_t j = 0; j < judges.size(); ++j) {
        const ChatExchange ex =
            judges[j]->complete(make_request(PromptId::kJudgeQa, bindings, cfg.judge.judges[j].temperature));
        try {
            scores.push_back(parse_judge(ex.response));
            outcome.parse_failed.push_back(false);
        } catch (const ParseError&) {
            scores.push_back(JudgeScores{});
            outcome.parse_failed.push_back(true);
        } catch (const ValidationError&) {
            scores.push_back(JudgeScores{});
            outcome.parse_failed.push_back(true);
        }
    }
    outcome.verdict = decide(std::move(scores), cfg.judge);
    return outcome;
}

StageOutput generate_qa(std::vector<DataSample> raw, const PipelineConfig& cfg, ChatProvider& generator,
                        std::span<ChatProvider* const> judges) {
    struct Slot {
        std::optional<Failure> failure;
        std::string condensed;
        bool lenient = false;
        GeneratedPair pair;
        JudgeOutcome judged;
        std::size_t reprompts = 0;
    };
    std::vector<Slot> slots(raw.size());

    parallel_for(raw.size(), cfg.concurrency_limit, [&](std::size_t i) {
        const DataSample& s = raw[i];
        Slot& slot = slots[i];
        try {
            if (s.kind != SampleKind::kRawText) throw ValidationError("kind", "QA generation needs raw_text samples");
            const std::string lang(language_name(s.lang));
            const auto condensed = ask_with_reprompt(
                generator, PromptId::kCondense, {{"LANG", lang}, {"original_text", *s.raw_text}},
                cfg.provider.temperature, [](const std::string& r) { return parse_condensed(r); }, slot.reprompts);
            slot.condensed = condensed.text;
            slot.lenient = condensed.lenient;
            slot.pair = ask_with_reprompt(
                generator, PromptId::kGenQa, {{"LANG", lang}, {"condensed_text", slot.condensed}},
                cfg.provider.temperature, [](const std::string& r) { return parse_generated_pair(r); },
                slot.reprompts);
            slot.judged = run_judges(lang, slot.condensed, render_generated_pair(slot.pair), cfg, judges);
        } catch (const std::exception& e) {
            slot.failure = classify(e);
        }
    });

    StageOutput out;
    out.report.stage = "genqa";
    out.report.inputs = raw.size();
    auto& hist = out.report.histograms["judge_min_criterion"];
    for (std::size_t i = 0; i < raw.size(); ++i) {
        Slot& slot = slots[i];
        out.report.counters["reprompts"] += slot.reprompts;
        if (slot.failure) {
            ++out.report.counters["inputs_failed"];
            mark_failure(raw[i], "gen", *slot.failure);
            out.rejected.push_back(std::move(raw[i]));
            continue;
        }
        ++out.report.counters["pairs_generated"];
        hist.add(min_criterion(slot.judged.verdict.aggregated));

        const DataSample& parent = raw[i];
        DataSample mc;
        mc.id = parent.id + ".mc";
        mc.lang = parent.lang;
        mc.kind = SampleKind::kMultipleChoiceQa;
        mc.question = slot.pair.mc.question;
        mc.options = slot.pair.mc.options;
        mc.rationale = slot.pair.mc.rationale;
        mc.answer = slot.pair.mc.answer;
        mc.source = parent.source;
        mc.annotations = parent.annotations;

        DataSample sa;
        sa.id = parent.id + ".sa";
        sa.lang = parent.lang;
        sa.kind = SampleKind::kShortAnswerQa;
        sa.question = slot.pair.short_answer.question;
        sa.answer = slot.pair.short_answer.answer;
        sa.source = parent.source;
        sa.annotations = parent.annotations;

        for (DataSample* s : {&mc, &sa}) {
            annotate(*s, "gen.parent", parent.id);
            annotate(*s, "gen.context", slot.condensed);
            annotate(*s, "gen.prompt", std::string(prompt_id_name(PromptId::kGenQa)));
            annotate(*s, "gen.model", generator.model());
            if (slot.lenient) annotate(*s, "gen.condense_lenient", true);
            annotate_verdict(*s, "gen.judge", slot.judged, cfg, judges);
        }
        if (slot.judged.verdict.accepted) {
            ++out.report.counters["pairs_accepted"];
            out.accepted.push_back(std::move(mc));
            out.accepted.push_back(std::move(sa));
        } else {
            ++out.report.counters["pairs_rejected"];
            for (DataSample* s : {&mc, &sa}) {
                mark_failure(*s, "gen", {"judge", "aggregated judge score below threshold"});
                out.rejected.push_back(std::move(*s));
            }
        }
    }
    out.report.accepted = out.accepted.size();
    out.report.rejected = out.rejected.size();
    count_outcome(out.report, out.rejected, "gen");
    return out;
}

StageOutput judge_samples(std::vector<DataSample> samples, const PipelineConfig& cfg,
                          std::span<ChatProvider* const> judges) {
    std::vector<std::optional<Failure>> failures(samples.size());
    std::vector<JudgeOutcome> outcomes(samples.size());
    parallel_for(samples.size(), cfg.concurrency_limit, [&](std::size_t i) {
        const DataSample& s = samples[i];
        try {
            std::string qa;
            if (s.kind == SampleKind::kMultipleChoiceQa) {
                qa = render_mc_block({*s.question, *s.options, s.rationale.value_or(""), *s.answer});
            } else if (s.kind == SampleKind::kShortAnswerQa) {
                qa = render_short_block({*s.question, *s.answer});
            } else {
                throw ValidationError("kind", "only QA samples can be judged");
            }
            std::string context = annotation_string(s, "gen.context").value_or(s.rationale.value_or(""));
            outcomes[i] = run_judges(language_name(s.lang), context, qa, cfg, judges);
        } catch (const std::exception& e) {
            failures[i] = classify(e);
        }
    });

    StageOutput out;
    out.report.stage = "judge";
    out.report.inputs = samples.size();
    auto& hist = out.report.histograms["judge_min_criterion"];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        DataSample& s = samples[i];
        if (failures[i]) {
            mark_failure(s, "judge", *failures[i]);
            out.rejected.push_back(std::move(s));
            continue;
        }
        hist.add(min_criterion(outcomes[i].verdict.aggregated));
        annotate_verdict(s, "judge", outcomes[i], cfg, judges);
        if (outcomes[i].verdict.accepted) {
            out.accepted.push_back(std::move(s));
        } else {
            mark_failure(s, "judge", {"judge", "aggregated judge score below threshold"});
            out.rejected.push_back(std::move(s));
        }
    }
    out.report.accepted = out.accepted.size();
    out.report.rejected = out.rejected.size();
    count_outcome(out.report, out.rejected, "judge");
    return out;
}

std::vector<std::pair<std::string, std::string>> translatable_fields(const DataSample& s) {
    std::vector<std::pair<std::string, std::string>> fields;
    if (s.kind == SampleKind::kRawText) {
        fields.emplace_back("raw_text", *s.raw_text);
        return fields;
    }
    fields.emplace_back("question", *s.question);
    if (s.kind == SampleKind::kMultipleChoiceQa) {
        for (const auto& opt : *s.options) fields.emplace_back("options." + opt.label, opt.text);
        if (s.rationale) fields.emplace_back("rationale", *s.rationale);
    } else {
        fields.emplace_back("answer", *s.answer);
        if (s.rationale) fields.emplace_back("rationale", *s.rationale);
    }
    return fields;
}

namespace {

std::string translate_text(ChatProvider& translator, std::string_view text, Language from, Language to) {
    const PromptBindings bindings{{"source_lang", std::string(language_name(from))},
                                  {"target_lang", std::string(language_name(to))},
                                  {"original_text", std::string(text)}};
    std::string out = trimmed(translator.complete(make_request(PromptId::kTranslate, bindings, 0.0)).response);
    if (out.empty()) throw ValidationError("translation", "provider returned an empty translation");
    return out;
}

void set_field(DataSample& s, const std::string& field, std::string value) {
    if (field == "raw_text") {
        s.raw_text = std::move(value);
    } else if (field == "question") {
        s.question = std::move(value);
    } else if (field == "answer") {
        s.answer = std::move(value);
    } else if (field == "rationale") {
        s.rationale = std::move(value);
    } else if (field.rfind("options.", 0) == 0) {
        const std::string label = field.substr(8);
        for (auto& opt : *s.options) {
            if (opt.label == label) opt.text = std::move(value);
        }
    }
}

void annotate_record(DataSample& s, const TranslationRecord& r, const CctsConfig& ccts, TokenizerMode mode) {
    annotate(s, "translate.source_id", r.source.id);
    annotate(s, "translate.source_lang", std::string(language_code(r.source_lang)));
    annotate(s, "translate.target_lang", std::string(language_code(r.target_lang)));
    annotate(s, "translate.prompt", std::string(prompt_id_name(PromptId::kTranslate)));
    annotate(s, "ccts.lambda1", ccts.lambda1);
    annotate(s, "ccts.lambda2", ccts.lambda2);
    annotate(s, "ccts.threshold", ccts.accept_threshold);
    annotate(s, "ccts.tokenizer", std::string(tokenizer_mode_name(mode)));
    annotate(s, "ccts.weakest_field", r.fields[r.weakest].field);
    annotate(s, "ccts.bleu_mean", r.bleu_mean);
    annotate(s, "ccts.embed", r.embed_score);
    annotate(s, "ccts.score", r.ccts);
    annotate(s, "ccts.accepted", r.accepted);
    for (const auto& f : r.fields) {
        annotate(s, "translate." + f.field + ".source", f.source);
        annotate(s, "translate." + f.field + ".back", f.back);
        annotate(s, "ccts." + f.field + ".score", f.scores.score);
    }
}

}  // namespace

TranslateOutput translate_with_gate(std::vector<DataSample> samples, Language target, const PipelineConfig& cfg,
                                    ChatProvider& translator, const EmbeddingProvider& embedding) {
    cfg.ccts.validate();
    std::vector<std::optional<Failure>> failures(samples.size());
    std::vector<std::optional<TranslationRecord>> records(samples.size());

    parallel_for(samples.size(), cfg.concurrency_limit, [&](std::size_t i) {
        const DataSample& s = samples[i];
        try {
            if (s.lang == target) throw ValidationError("lang", "sample is already in the target language");
            const TokenizerMode mode = cfg.ccts.tokenizer_mode.value_or(default_tokenizer_mode(s.lang));
            TranslationRecord r;
            r.source = s;
            r.source_lang = s.lang;
            r.target_lang = target;
            for (auto& [name, text] : translatable_fields(s)) {
                FieldTranslation f;
                f.field = name;
                f.source = text;
                f.forward = translate_text(translator, text, s.lang, target);
                f.back = translate_text(translator, f.forward, target, s.lang);
                f.scores = ccts_breakdown(f.source, f.back, cfg.ccts, embedding, mode);
                r.fields.push_back(std::move(f));
            }
            for (std::size_t k = 1; k < r.fields.size(); ++k) {
                if (r.fields[k].scores.score < r.fields[r.weakest].scores.score) r.weakest = k;
            }
            const auto& w = r.fields[r.weakest].scores;
            r.bleu_mean = w.bleu.mean;
            r.embed_score = w.embed;
            r.ccts = w.score;
            r.accepted = r.ccts > cfg.ccts.accept_threshold;
            records[i] = std::move(r);
        } catch (const std::exception& e) {
            failures[i] = classify(e);
        }
    });

    TranslateOutput out;
    out.report.stage = "translate";
    out.report.inputs = samples.size();
    auto& hist = out.report.histograms["ccts"];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        DataSample& s = samples[i];
        if (failures[i]) {
            mark_failure(s, "translate", *failures[i]);
            out.rejected.push_back(std::move(s));
            continue;
        }
        TranslationRecord& r = *records[i];
        const TokenizerMode mode = cfg.ccts.tokenizer_mode.value_or(default_tokenizer_mode(s.lang));
        hist.add(r.ccts);
        if (r.accepted) {
            DataSample t = s;
            t.id = s.id + "." + std::string(language_code(target));
            std::transform(t.id.end() - 2, t.id.end(), t.id.end() - 2,
                           [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
            t.lang = target;
            for (const auto& f : r.fields) set_field(t, f.field, f.forward);
            annotate_record(t, r, cfg.ccts, mode);
            out.accepted.push_back(std::move(t));
        } else {
            annotate_record(s, r, cfg.ccts, mode);
            mark_failure(s, "translate", {"gate", "ccts not above accept threshold"});
            out.rejected.push_back(std::move(s));
        }
        out.records.push_back(std::move(r));
    }
    out.report.accepted = out.accepted.size();
    out.report.rejected = out.rejected.size();
    count_outcome(out.report, out.rejected, "translate");
    return out;
}

GateRecheck recheck_translation(const DataSample& s, const EmbeddingProvider& embedding) {
    auto number = [&](std::string_view key) {
        auto v = annotation_number(s, key);
        if (!v) throw ValidationError(std::string(key), "annotation missing");
        return *v;
    };
    auto text = [&](std::string_view key) {
        auto v = annotation_string(s, key);
        if (!v) throw ValidationError(std::string(key), "annotation missing");
        return *v;
    };
    CctsConfig cfg;
    cfg.lambda1 = number("ccts.lambda1");
    cfg.lambda2 = number("ccts.lambda2");
    cfg.accept_threshold = number("ccts.threshold");
    const TokenizerMode mode = parse_tokenizer_mode(text("ccts.tokenizer"));

    GateRecheck out;
    out.recorded = number("ccts.score");
    if (auto it = s.annotations.find("ccts.accepted"); it != s.annotations.end()) {
        if (const bool* b = std::get_if<bool>(&it->second)) out.recorded_accepted = *b;
    }
    bool first = true;
    const std::string prefix = "translate.";
    for (const auto& [key, value] : s.annotations) {
        if (key.rfind(prefix, 0) != 0 || key.size() < 7 || key.compare(key.size() - 7, 7, ".source") != 0) continue;
        const std::string field = key.substr(prefix.size(), key.size() - prefix.size() - 7);
        const double score =
            ccts_breakdown(text(key), text(prefix + field + ".back"), cfg, embedding, mode).score;
        if (first || score < out.recomputed) out.recomputed = score;
        first = false;
    }
    if (first) throw ValidationError("translate", "no translated fields recorded");
    out.recomputed_accepted = out.recomputed > cfg.accept_threshold;
    return out;
}

}  // namespace mifc
