#include "mifc/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mifc/assembly.hpp"
#include "mifc/config.hpp"
#include "mifc/dedup.hpp"
#include "mifc/digest.hpp"
#include "mifc/error.hpp"
#include "mifc/filtering.hpp"
#include "mifc/http_embedding.hpp"
#include "mifc/jsonl_io.hpp"
#include "mifc/leakage.hpp"
#include "mifc/pipeline.hpp"
#include "mifc/replay.hpp"
#include "mifc/training_config.hpp"

namespace mifc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class Logger {
public:
    Logger(std::ostream& sink, bool as_json) : sink_(sink), json_(as_json) {}

    void info(const std::string& msg, const json& fields = json::object()) { write("info", msg, fields); }
    void error(const std::string& msg, const json& fields = json::object()) { write("error", msg, fields); }

private:
    void write(const char* level, const std::string& msg, const json& fields) {
        if (json_) {
            json line = {{"level", level}, {"msg", msg}};
            for (const auto& [k, v] : fields.items()) line[k] = v;
            sink_ << line.dump() << '\n';
            return;
        }
        sink_ << "mifc: " << (std::string(level) == "error" ? "error: " : "") << msg;
        for (const auto& [k, v] : fields.items()) sink_ << ' ' << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
        sink_ << '\n';
    }

    std::ostream& sink_;
    bool json_;
};

struct GlobalOptions {
    std::string config;
    std::string log_format = "text";
    std::size_t jobs = 0;
    std::string replay;
    std::string record;
    std::string report;
};

struct StageOptions {
    std::string input;
    std::string out;
};

struct Options {
    GlobalOptions global;
    StageOptions stage;
    std::string keywords;
    std::optional<double> thres1;
    std::optional<std::int64_t> thres2;
    std::string match_mode;
    std::string kept;
    std::string rejected;
    std::string metric = "ccts";
    std::string text_a;
    std::string text_b;
    std::string lang = "EN";
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    std::string target;
    std::optional<double> threshold;
    std::string ift;
    std::string mc_train;
    std::string mc_test;
    std::optional<std::size_t> probes;
    std::optional<std::uint64_t> seed;
    std::string spec;
    std::string out_dir;
    std::string manifests;
    std::string manifest;
};

/// Collects what goes into the single report file of a run.
struct RunReport {
    std::string command;
    json inputs = json::array();
    json outputs = json::array();
    json counts = json::object();
    std::string config_digest;

    void add_input(const fs::path& p) { inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}}); }
    void add_output(const fs::path& p) { outputs.push_back(p.string()); }
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kFormat:
        case ErrorKind::kValidation:
        case ErrorKind::kParse: return kExitData;
        case ErrorKind::kTransport: return kExitTransport;
        case ErrorKind::kConfig: return kExitConfig;
    }
    return kExitData;
}

/// Chat providers for one run, live or replayed, plus the optional recorder.
class Providers {
public:
    Providers(const GlobalOptions& g, const PipelineConfig& cfg) : cfg_(cfg) {
        if (!g.replay.empty() && !g.record.empty()) throw ConfigError("--replay and --record are exclusive");
        if (!g.replay.empty()) replay_ = ReplayStore::load(g.replay);
        if (!g.record.empty()) {
            record_ = std::make_shared<ReplayStore>();
            record_path_ = g.record;
            if (fs::exists(record_path_)) record_ = ReplayStore::load(record_path_);
        }
    }

    std::shared_ptr<ChatProvider> chat(const ProviderConfig& pc) {
        if (replay_) return std::make_shared<ReplayProvider>(replay_, pc.model_name);
        if (!transport_) transport_ = make_default_transport();
        std::shared_ptr<ChatProvider> live = std::make_shared<ChatClient>(pc, transport_);
        if (record_) return std::make_shared<RecordingProvider>(live, record_);
        return live;
    }

    std::unique_ptr<EmbeddingProvider> embedding() {
        if (cfg_.embedding.kind == EmbeddingKind::kHttp) {
            if (!transport_) transport_ = make_default_transport();
            return std::make_unique<HttpEmbeddingProvider>(cfg_.embedding.provider, transport_);
        }
        return std::make_unique<DeterministicEmbeddingProvider>(cfg_.embedding.dim, cfg_.embedding.seed);
    }

    void flush() {
        if (record_) record_->save(record_path_);
    }

private:
    const PipelineConfig& cfg_;
    std::shared_ptr<ReplayStore> replay_;
    std::shared_ptr<ReplayStore> record_;
    fs::path record_path_;
    std::shared_ptr<HttpTransport> transport_;
};

fs::path with_suffix(const std::string& prefix, const char* suffix) { return fs::path(prefix + suffix); }

void write_stage_outputs(const std::string& out, const std::vector<DataSample>& accepted,
                         const std::vector<DataSample>& rejected, RunReport& report) {
    const fs::path parent = fs::path(out).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_samples_atomic(with_suffix(out, ".jsonl"), accepted);
    write_samples_atomic(with_suffix(out, ".rejected.jsonl"), rejected);
    report.add_output(with_suffix(out, ".jsonl"));
    report.add_output(with_suffix(out, ".rejected.jsonl"));
}

PipelineConfig load_effective_config(const Options& o) {
    PipelineConfig cfg = o.global.config.empty() ? PipelineConfig::defaults() : load_config(o.global.config);
    if (o.global.jobs > 0) cfg.concurrency_limit = o.global.jobs;
    if (!o.keywords.empty()) cfg.filter.keywords = read_nonblank_lines(o.keywords);
    if (o.thres1) cfg.filter.thres1 = *o.thres1;
    if (o.thres2) cfg.filter.thres2 = *o.thres2;
    if (!o.match_mode.empty()) cfg.filter.match_mode = parse_match_mode(o.match_mode);
    if (o.lambda1) cfg.ccts.lambda1 = *o.lambda1;
    if (o.lambda2) cfg.ccts.lambda2 = *o.lambda2;
    if (o.threshold) cfg.ccts.accept_threshold = *o.threshold;
    if (o.probes) cfg.probes_per_language = *o.probes;
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate();
    return cfg;
}

std::vector<ChatProvider*> raw_pointers(const std::vector<std::shared_ptr<ChatProvider>>& v) {
    std::vector<ChatProvider*> out;
    for (const auto& p : v) out.push_back(p.get());
    return out;
}

void print_manifest(std::ostream& out, const DatasetManifest& m) {
    out << "dataset " << dataset_name(m.name) << "  created " << m.created_at << "  config "
        << m.config_digest.substr(0, 12) << '\n';
    out << "  " << std::left << std::setw(6) << "lang" << std::right << std::setw(10) << "samples" << '\n';
    for (const auto& [lang, n] : m.per_language_counts) {
        out << "  " << std::left << std::setw(6) << language_code(lang) << std::right << std::setw(10) << n << '\n';
    }
    out << "  " << std::left << std::setw(6) << "total" << std::right << std::setw(10) << m.total() << '\n';
    out << "  dedup: " << m.input_samples << " in, " << m.exact_dups_removed << " exact, " << m.near_dups_removed
        << " near removed\n";
    if (m.leakage.performed) {
        out << "  leakage: " << m.leakage.probes_per_language << " probes/lang, seed " << m.leakage.seed << ", "
            << m.leakage.collisions.size() << " collisions (" << (m.leakage.pass() ? "pass" : "FAIL") << ")\n";
        for (const auto& s : m.leakage.shortfalls) {
            out << "    shortfall " << language_code(s.lang) << ": " << s.available << " of " << s.requested << '\n';
        }
    } else {
        out << "  leakage: not performed\n";
    }
    for (const auto& f : m.files) {
        out << "  " << f.path << "  " << f.samples << "  " << f.sha256.substr(0, 16) << '\n';
    }
}

json score_one(const std::string& metric, const std::string& a, const std::string& b, Language lang,
               const PipelineConfig& cfg, const EmbeddingProvider& embedding) {
    const TokenizerMode mode = cfg.ccts.tokenizer_mode.value_or(default_tokenizer_mode(lang));
    if (metric == "bleu") {
        const BleuScore s = bleu(a, b, mode);
        return {{"bleu", s.per_n}, {"bleu_mean", s.mean}, {"brevity_penalty", s.brevity_penalty}};
    }
    if (metric == "embed") {
        const auto s = embed_similarity_breakdown(a, b, embedding, mode);
        return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
    }
    const CctsBreakdown s = ccts_breakdown(a, b, cfg.ccts, embedding, mode);
    return {{"bleu", s.bleu.per_n},
            {"bleu_mean", s.bleu.mean},
            {"brevity_penalty", s.bleu.brevity_penalty},
            {"embed", s.embed},
            {"ccts", s.score},
            {"accepted", s.score > cfg.ccts.accept_threshold}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Multilingual medical instruction-data curation pipeline", "mifc"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", o.global.config, "Pipeline config JSON")->check(CLI::ExistingFile);
    app.add_option("--log-format", o.global.log_format, "json or text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--jobs", o.global.jobs, "Worker threads (overrides concurrency_limit)")
        ->check(CLI::PositiveNumber);
    app.add_option("--replay", o.global.replay, "Answer chat requests from a recorded exchange file")
        ->check(CLI::ExistingFile);
    app.add_option("--record", o.global.record, "Record live chat exchanges to this file");
    app.add_option("--report", o.global.report, "Run report path");

    auto stage_io = [&](CLI::App* sub) {
        sub->add_option("--input", o.stage.input, "Input JSONL")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.stage.out, "Output prefix: <out>.jsonl, <out>.rejected.jsonl, <out>.report.json")
            ->required();
    };

    auto* filter = app.add_subcommand("filter", "Knowledge-density keyword filter");
    filter->add_option("--input", o.stage.input, "Input JSONL")->required()->check(CLI::ExistingFile);
    auto* filter_out = filter->add_option("--out", o.stage.out, "Output prefix (or use --kept and --rejected)");
    auto* filter_kept = filter->add_option("--kept", o.kept, "Kept samples JSONL");
    auto* filter_rejected = filter->add_option("--rejected", o.rejected, "Rejected samples JSONL");
    filter_kept->needs(filter_rejected)->excludes(filter_out);
    filter_rejected->needs(filter_kept)->excludes(filter_out);
    filter->add_option("--keywords", o.keywords, "Keyword list, one per line")->check(CLI::ExistingFile);
    filter->add_option("--thres1", o.thres1, "Keep when density R > thres1");
    filter->add_option("--thres2", o.thres2, "Keep when unique keyword count > thres2");
    filter->add_option("--match-mode", o.match_mode, "word_boundary or substring");

    auto* score = app.add_subcommand("score", "BLEU, embedding similarity or CCTS of line-aligned text pairs");
    score->add_option("--metric", o.metric, "bleu, embed or ccts")->check(CLI::IsMember({"bleu", "embed", "ccts"}));
    score->add_option("--a", o.text_a, "Source texts (or candidates for bleu), one per line")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--b", o.text_b, "Back-translations (or references for bleu), one per line")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--lang", o.lang, "Language of the texts, selects the tokenizer");
    score->add_option("--lambda1", o.lambda1, "BLEU weight");
    score->add_option("--lambda2", o.lambda2, "Embedding weight");
    score->add_option("--threshold", o.threshold, "Accept threshold");

    auto* expand = app.add_subcommand("expand", "Expand keyword answers into prose");
    stage_io(expand);

    auto* genqa = app.add_subcommand("genqa", "Condense, generate and judge QA pairs");
    stage_io(genqa);

    auto* translate = app.add_subcommand("translate", "Cycle-consistency gated translation");
    stage_io(translate);
    translate->add_option("--target", o.target, "Target language code")->required();
    translate->add_option("--threshold", o.threshold, "Accept when CCTS > threshold");
    translate->add_option("--lambda1", o.lambda1, "BLEU weight");
    translate->add_option("--lambda2", o.lambda2, "Embedding weight");

    auto* judge = app.add_subcommand("judge", "Judge existing QA samples");
    stage_io(judge);

    auto* dedup_cmd = app.add_subcommand("dedup", "Exact and near-duplicate removal");
    stage_io(dedup_cmd);

    auto* leak = app.add_subcommand("leak-check", "Probe the IFT set against MC train/test");
    leak->add_option("--ift", o.ift, "IFT JSONL")->required()->check(CLI::ExistingFile);
    leak->add_option("--mc-train", o.mc_train, "MC train JSONL")->check(CLI::ExistingFile);
    leak->add_option("--mc-test", o.mc_test, "MC test JSONL")->check(CLI::ExistingFile);
    leak->add_option("--probes", o.probes, "Probes per language")->check(CLI::PositiveNumber);
    leak->add_option("--seed", o.seed, "Sampling seed");

    auto* assemble_cmd = app.add_subcommand("assemble", "Build dataset shards and manifests");
    assemble_cmd->add_option("--spec", o.spec, "Assembly spec JSON")->required()->check(CLI::ExistingFile);
    assemble_cmd->add_option("--out", o.out_dir, "Output directory")->required();

    auto* emit = app.add_subcommand("emit-train-config", "Write the two training stage configs");
    emit->add_option("--out", o.out_dir, "Output directory")->required();
    emit->add_option("--manifests", o.manifests, "Directory holding both dataset manifests")
        ->check(CLI::ExistingDirectory);

    auto* report_cmd = app.add_subcommand("report", "Print per-language tables of a manifest");
    report_cmd->add_option("--manifest", o.manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);

    std::vector<const char*> argv{"mifc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    Logger log(err, o.global.log_format == "json");
    CLI::App* sub = app.get_subcommands().front();
    RunReport report;
    report.command = sub->get_name();
    const auto started = std::chrono::steady_clock::now();

    fs::path report_path = o.global.report;
    if (report_path.empty()) {
        if (!o.stage.out.empty()) {
            report_path = with_suffix(o.stage.out, ".report.json");
        } else if (!o.kept.empty()) {
            report_path = fs::path(o.kept).replace_extension(".report.json");
        } else if (!o.out_dir.empty()) {
            report_path = fs::path(o.out_dir) / (report.command + ".report.json");
        } else {
            report_path = "mifc-" + report.command + ".report.json";
        }
    }

    int code = kExitOk;
    std::string failure;
    std::optional<Providers> providers;
    try {
        const PipelineConfig cfg = load_effective_config(o);
        report.config_digest = config_digest(cfg);
        if (!o.global.config.empty()) report.add_input(o.global.config);
        providers.emplace(o.global, cfg);
        if (!o.global.replay.empty()) report.add_input(o.global.replay);

        auto load_input = [&](const std::string& path) {
            report.add_input(path);
            return read_samples(path);
        };

        if (sub == filter) {
            if (o.stage.out.empty() && o.kept.empty()) throw ConfigError("filter needs --out, or --kept and --rejected");
            cfg.filter.validate();
            auto part = filter_stream(load_input(o.stage.input), cfg.filter, cfg.concurrency_limit);
            StageReport sr;
            sr.stage = "filter";
            sr.inputs = part.kept.size() + part.rejected.size();
            sr.accepted = part.kept.size();
            sr.rejected = part.rejected.size();
            for (const auto* set : {&part.kept, &part.rejected}) {
                for (const auto& s : *set) {
                    if (auto r = annotation_number(s, "filter.R")) sr.histograms["R"].add(*r);
                    if (annotation_string(s, "filter.error")) ++sr.counters["rejected.error"];
                }
            }
            if (o.stage.out.empty()) {
                for (const auto& [path, set] : {std::pair{fs::path(o.kept), &part.kept},
                                                std::pair{fs::path(o.rejected), &part.rejected}}) {
                    if (path.has_parent_path()) fs::create_directories(path.parent_path());
                    write_samples_atomic(path, *set);
                    report.add_output(path);
                }
            } else {
                write_stage_outputs(o.stage.out, part.kept, part.rejected, report);
            }
            report.counts = sr.to_json();
        } else if (sub == score) {
            auto embedding = providers->embedding();
            report.add_input(o.text_a);
            report.add_input(o.text_b);
            const auto a = read_nonblank_lines(o.text_a);
            const auto b = read_nonblank_lines(o.text_b);
            if (a.size() != b.size()) {
                throw ValidationError("b", "--a has " + std::to_string(a.size()) + " lines, --b has " +
                                               std::to_string(b.size()));
            }
            const Language lang = parse_language(o.lang, "lang");
            for (std::size_t i = 0; i < a.size(); ++i) {
                out << score_one(o.metric, a[i], b[i], lang, cfg, *embedding).dump() << '\n';
            }
            report.counts = {{"metric", o.metric}, {"scored", a.size()}};
        } else if (sub == expand) {
            auto generator = providers->chat(cfg.provider);
            auto result = expand_answers(load_input(o.stage.input), cfg, *generator);
            write_stage_outputs(o.stage.out, result.accepted, result.rejected, report);
            report.counts = result.report.to_json();
        } else if (sub == genqa) {
            auto generator = providers->chat(cfg.provider);
            std::vector<std::shared_ptr<ChatProvider>> judges;
            for (const auto& j : cfg.judge.judges) judges.push_back(providers->chat(j));
            const auto ptrs = raw_pointers(judges);
            auto result = generate_qa(load_input(o.stage.input), cfg, *generator, ptrs);
            write_stage_outputs(o.stage.out, result.accepted, result.rejected, report);
            report.counts = result.report.to_json();
        } else if (sub == translate) {
            const Language target = parse_language(o.target, "target");
            auto translator = providers->chat(cfg.provider);
            auto embedding = providers->embedding();
            auto result = translate_with_gate(load_input(o.stage.input), target, cfg, *translator, *embedding);
            write_stage_outputs(o.stage.out, result.accepted, result.rejected, report);
            report.counts = result.report.to_json();
        } else if (sub == judge) {
            std::vector<std::shared_ptr<ChatProvider>> judges;
            for (const auto& j : cfg.judge.judges) judges.push_back(providers->chat(j));
            const auto ptrs = raw_pointers(judges);
            auto result = judge_samples(load_input(o.stage.input), cfg, ptrs);
            write_stage_outputs(o.stage.out, result.accepted, result.rejected, report);
            report.counts = result.report.to_json();
        } else if (sub == dedup_cmd) {
            auto samples = load_input(o.stage.input);
            const std::size_t in = samples.size();
            auto result = dedup(std::move(samples), cfg.dedup, cfg.concurrency_limit);
            const fs::path parent = fs::path(o.stage.out).parent_path();
            if (!parent.empty()) fs::create_directories(parent);
            write_samples_atomic(with_suffix(o.stage.out, ".jsonl"), result.unique);
            report.add_output(with_suffix(o.stage.out, ".jsonl"));
            json removed = json::array();
            for (const auto& [gone, kept] : result.report.removed) removed.push_back({{"removed", gone}, {"kept", kept}});
            report.counts = {{"inputs", in},
                             {"unique", result.unique.size()},
                             {"exact_dups_removed", result.report.exact_dups_removed},
                             {"near_dups_removed", result.report.near_dups_removed},
                             {"removed", removed}};
        } else if (sub == leak) {
            auto ift = load_input(o.ift);
            std::vector<DataSample> train, test;
            if (!o.mc_train.empty()) train = load_input(o.mc_train);
            if (!o.mc_test.empty()) test = load_input(o.mc_test);
            const auto lr = check_leakage(ift, train, test, cfg.probes_per_language, cfg.seed, cfg.dedup);
            report.counts = leakage_to_json(lr);
            out << (lr.pass() ? "pass" : "FAIL") << ": " << lr.collisions.size() << " collisions\n";
            for (const auto& c : lr.collisions) {
                out << "  " << c.probe_id << " -> " << c.set << ':' << c.sample_id << " (" << c.match_kind << ")\n";
            }
            if (!lr.pass()) {
                code = kExitData;
                failure = "leakage detected";
            }
        } else if (sub == assemble_cmd) {
            report.add_input(o.spec);
            const auto spec = load_assembly_spec(o.spec);
            for (const auto& in : spec.inputs) report.add_input(in.path);
            const auto result = assemble(spec, cfg, o.out_dir);
            report.add_output(result.ift_manifest_path);
            report.add_output(result.mc_manifest_path);
            for (const auto* m : {&result.ift, &result.mc}) {
                for (const auto& f : m->files) report.add_output(fs::path(o.out_dir) / f.path);
                report.counts[std::string(dataset_name(m->name))] = {
                    {"samples", m->total()},
                    {"exact_dups_removed", m->exact_dups_removed},
                    {"near_dups_removed", m->near_dups_removed}};
            }
            report.counts["leakage_pass"] = result.ift.leakage.pass();
        } else if (sub == emit) {
            std::pair<TrainingStageConfig, TrainingStageConfig> configs{stage1_config(), stage2_config()};
            if (!o.manifests.empty()) {
                const fs::path dir = o.manifests;
                report.add_input(dir / "mmed_ift.manifest.json");
                report.add_input(dir / "mmed_ift_mc.manifest.json");
                configs = emit_training_configs(load_manifest(dir / "mmed_ift.manifest.json"),
                                                load_manifest(dir / "mmed_ift_mc.manifest.json"));
            }
            const auto [first, second] = write_training_configs(o.out_dir, configs);
            report.add_output(first);
            report.add_output(second);
            report.counts = {{"configs", 2}};
        } else if (sub == report_cmd) {
            report.add_input(o.manifest);
            const auto m = load_manifest(o.manifest);
            print_manifest(out, m);
            report.counts = {{"samples", m.total()}};
        }
        providers->flush();
    } catch (const Error& e) {
        if (providers) providers->flush();
        code = exit_code_for(e.kind());
        failure = e.what();
    } catch (const std::exception& e) {
        if (providers) providers->flush();
        code = kExitData;
        failure = e.what();
    }

    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    json doc = {{"command", report.command},
                {"status", code == kExitOk ? "ok" : "error"},
                {"exit_code", code},
                {"inputs", report.inputs},
                {"outputs", report.outputs},
                {"counts", report.counts},
                {"duration_ms", elapsed.count()},
                {"config_digest", report.config_digest}};
    if (!failure.empty()) doc["error"] = failure;
    try {
        const fs::path parent = report_path.parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        write_file_atomic(report_path, doc.dump(2) + "\n");
    } catch (const std::exception& e) {
        log.error(std::string("could not write run report: ") + e.what());
        if (code == kExitOk) code = kExitConfig;
    }

    if (code == kExitOk) {
        log.info(report.command + " done", {{"report", report_path.string()}, {"duration_ms", elapsed.count()}});
    } else {
        log.error(failure, {{"command", report.command}, {"exit_code", code}});
    }
    return code;
}

}  // namespace mifc::cli
