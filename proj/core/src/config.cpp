#include "mifc/config.hpp"

#include "mifc/digest.hpp"
#include "mifc/error.hpp"
#include "mifc/jsonl_io.hpp"

namespace mifc {

using json = nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

const json& object_or_empty(const json& j, const char* key) {
    static const json kEmpty = json::object();
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return kEmpty;
    if (!it->is_object()) throw ConfigError(std::string("config field '") + key + "' must be an object");
    return *it;
}

ProviderConfig judge_default(std::string model) {
    ProviderConfig p;
    p.base_url = "https://api.openai.com/v1";
    p.model_name = std::move(model);
    p.temperature = 0.0;
    return p;
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
    PipelineConfig cfg;
    cfg.provider.base_url = "https://api.openai.com/v1";
    cfg.provider.model_name = "gpt-4o-mini";
    cfg.provider.temperature = 0.7;
    cfg.judge.judges = {judge_default("gpt-4"), judge_default("claude-3-5-sonnet")};
    cfg.embedding.provider = judge_default("text-embedding-3-small");
    return cfg;
}

void PipelineConfig::validate(bool require_keywords) const {
    if (require_keywords || !filter.keywords.empty()) filter.validate();
    ccts.validate();
    judge.validate();
    provider.validate();
    dedup.validate();
    if (embedding.kind == EmbeddingKind::kHttp) embedding.provider.validate();
    if (embedding.dim == 0) throw ConfigError("embedding.dim must be positive");
    if (concurrency_limit == 0) throw ConfigError("concurrency_limit must be positive");
    if (probes_per_language == 0) throw ConfigError("leakage.probes_per_language must be >= 1");
}

json provider_to_json(const ProviderConfig& p) {
    return {{"base_url", p.base_url},       {"model_name", p.model_name},
            {"api_key_env", p.api_key_env}, {"timeout_ms", p.timeout.count()},
            {"max_retries", p.max_retries}, {"max_in_flight", p.max_in_flight},
            {"temperature", p.temperature}};
}

ProviderConfig provider_from_json(const json& j, ProviderConfig base) {
    if (!j.is_object()) throw ConfigError("provider config must be an object");
    base.base_url = get_or(j, "base_url", base.base_url);
    base.model_name = get_or(j, "model_name", base.model_name);
    base.api_key_env = get_or(j, "api_key_env", base.api_key_env);
    base.timeout = std::chrono::milliseconds(get_or<std::int64_t>(j, "timeout_ms", base.timeout.count()));
    base.max_retries = get_or(j, "max_retries", base.max_retries);
    base.max_in_flight = get_or(j, "max_in_flight", base.max_in_flight);
    base.temperature = get_or(j, "temperature", base.temperature);
    return base;
}

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    PipelineConfig cfg = PipelineConfig::defaults();

    const json& f = object_or_empty(j, "filter");
    cfg.filter.keywords = get_or(f, "keywords", cfg.filter.keywords);
    if (auto file = get_or<std::string>(f, "keywords_file", ""); !file.empty()) {
        std::filesystem::path p(file);
        if (p.is_relative()) p = base_dir / p;
        for (auto& k : read_nonblank_lines(p)) cfg.filter.keywords.push_back(std::move(k));
    }
    cfg.filter.thres1 = get_or(f, "thres1", cfg.filter.thres1);
    cfg.filter.thres2 = get_or(f, "thres2", cfg.filter.thres2);
    if (auto mode = get_or<std::string>(f, "match_mode", ""); !mode.empty() && mode != "by_language") {
        cfg.filter.match_mode = parse_match_mode(mode);
    }

    const json& c = object_or_empty(j, "ccts");
    cfg.ccts.lambda1 = get_or(c, "lambda1", cfg.ccts.lambda1);
    cfg.ccts.lambda2 = get_or(c, "lambda2", cfg.ccts.lambda2);
    cfg.ccts.accept_threshold = get_or(c, "accept_threshold", cfg.ccts.accept_threshold);
    if (auto mode = get_or<std::string>(c, "tokenizer_mode", ""); !mode.empty() && mode != "by_language") {
        cfg.ccts.tokenizer_mode = parse_tokenizer_mode(mode);
    }

    cfg.provider = provider_from_json(object_or_empty(j, "provider"), cfg.provider);

    const json& jd = object_or_empty(j, "judge");
    if (auto it = jd.find("judges"); it != jd.end()) {
        if (!it->is_array()) throw ConfigError("judge.judges must be an array");
        cfg.judge.judges.clear();
        for (const auto& entry : *it) cfg.judge.judges.push_back(provider_from_json(entry, judge_default("")));
    }
    cfg.judge.per_criterion_threshold = get_or(jd, "per_criterion_threshold", cfg.judge.per_criterion_threshold);
    if (auto agg = get_or<std::string>(jd, "aggregation", ""); !agg.empty()) {
        cfg.judge.aggregation = parse_aggregation(agg);
    }

    const json& e = object_or_empty(j, "embedding");
    if (auto kind = get_or<std::string>(e, "kind", "test-deterministic"); kind == "http") {
        cfg.embedding.kind = EmbeddingKind::kHttp;
    } else if (kind != "test-deterministic") {
        throw ConfigError("embedding.kind must be 'test-deterministic' or 'http'");
    }
    cfg.embedding.dim = get_or(e, "dim", cfg.embedding.dim);
    cfg.embedding.seed = get_or(e, "seed", cfg.embedding.seed);
    if (e.contains("provider")) cfg.embedding.provider = provider_from_json(e.at("provider"), cfg.embedding.provider);

    const json& d = object_or_empty(j, "dedup");
    cfg.dedup.near_dup_threshold = get_or(d, "near_dup_threshold", cfg.dedup.near_dup_threshold);
    cfg.dedup.shingle_size = get_or(d, "shingle_size", cfg.dedup.shingle_size);

    cfg.probes_per_language = get_or(object_or_empty(j, "leakage"), "probes_per_language", cfg.probes_per_language);
    cfg.concurrency_limit = get_or(j, "concurrency_limit", cfg.concurrency_limit);
    cfg.seed = get_or(j, "seed", cfg.seed);

    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    const json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file '" + path.string() + "' is not valid JSON");
    return config_from_json(j, path.parent_path());
}

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["filter"] = {{"keywords", cfg.filter.keywords},
                   {"thres1", cfg.filter.thres1},
                   {"thres2", cfg.filter.thres2},
                   {"match_mode", cfg.filter.match_mode ? std::string(match_mode_name(*cfg.filter.match_mode))
                                                        : std::string("by_language")}};
    j["ccts"] = {{"lambda1", cfg.ccts.lambda1},
                 {"lambda2", cfg.ccts.lambda2},
                 {"accept_threshold", cfg.ccts.accept_threshold},
                 {"tokenizer_mode", cfg.ccts.tokenizer_mode
                                        ? std::string(tokenizer_mode_name(*cfg.ccts.tokenizer_mode))
                                        : std::string("by_language")}};
    json judges = json::array();
    for (const auto& p : cfg.judge.judges) judges.push_back(provider_to_json(p));
    j["judge"] = {{"judges", judges},
                  {"per_criterion_threshold", cfg.judge.per_criterion_threshold},
                  {"aggregation", aggregation_name(cfg.judge.aggregation)}};
    j["provider"] = provider_to_json(cfg.provider);
    j["embedding"] = {{"kind", cfg.embedding.kind == EmbeddingKind::kHttp ? "http" : "test-deterministic"},
                      {"dim", cfg.embedding.dim},
                      {"seed", cfg.embedding.seed},
                      {"provider", provider_to_json(cfg.embedding.provider)}};
    j["dedup"] = {{"near_dup_threshold", cfg.dedup.near_dup_threshold}, {"shingle_size", cfg.dedup.shingle_size}};
    j["leakage"] = {{"probes_per_language", cfg.probes_per_language}};
    j["concurrency_limit"] = cfg.concurrency_limit;
    j["seed"] = cfg.seed;
    return j;
}

std::string config_digest(const PipelineConfig& cfg) { return sha256_hex(config_to_json(cfg).dump()); }

}  // namespace mifc
