#include "mifc/assembly.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <set>

#include "mifc/digest.hpp"
#include "mifc/error.hpp"
#include "mifc/jsonl_io.hpp"
#include "mifc/parallel.hpp"

namespace mifc {

namespace fs = std::filesystem;

namespace {

class DirectoryLock {
public:
    explicit DirectoryLock(fs::path path) : path_(std::move(path)) {
        const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0) {
            throw ConfigError("output directory is locked by another assembly (" + path_.string() + ")");
        }
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
        ::close(fd);
    }
    ~DirectoryLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    fs::path path_;
};

std::string resolve_created_at(const AssemblySpec& spec) {
    if (spec.created_at) return *spec.created_at;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (*end != '\0') throw ConfigError("SOURCE_DATE_EPOCH is not an integer");
        return format_utc(v);
    }
    const auto now = std::chrono::system_clock::now();
    return format_utc(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

DatasetManifest build_dataset(DatasetName name, std::vector<DataSample> samples, const PipelineConfig& cfg,
                              const fs::path& out_dir, std::vector<DataSample>& unique_out) {
    DatasetManifest m;
    m.name = name;
    m.input_samples = samples.size();
    // Translations are parallel copies of their sources, so duplicates are
    // only looked for within one language.
    std::map<Language, std::vector<DataSample>> by_lang;
    for (auto& s : samples) by_lang[s.lang].push_back(std::move(s));
    unique_out.clear();
    for (auto& [lang, group] : by_lang) {
        auto deduped = dedup(std::move(group), cfg.dedup, cfg.concurrency_limit);
        m.exact_dups_removed += deduped.report.exact_dups_removed;
        m.near_dups_removed += deduped.report.near_dups_removed;
        group = std::move(deduped.unique);
        unique_out.insert(unique_out.end(), group.begin(), group.end());
    }
    std::erase_if(by_lang, [](const auto& entry) { return entry.second.empty(); });

    const std::string dname(dataset_name(name));
    if (!by_lang.empty()) fs::create_directories(out_dir / dname);
    for (auto& [lang, shard] : by_lang) {
        std::string code(language_code(lang));
        for (auto& c : code) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        const std::string rel = dname + "/" + dname + "." + code + ".jsonl";
        const std::string bytes = serialize_samples(shard);
        write_file_atomic(out_dir / rel, bytes);
        m.files.push_back({rel, shard.size(), sha256_hex(bytes)});
        m.per_language_counts[lang] = shard.size();
    }
    return m;
}

}  // namespace

std::string_view dataset_name(DatasetName name) {
    return name == DatasetName::kMmedIft ? "mmed_ift" : "mmed_ift_mc";
}

DatasetName parse_dataset_name(std::string_view name) {
    if (name == "mmed_ift") return DatasetName::kMmedIft;
    if (name == "mmed_ift_mc") return DatasetName::kMmedIftMc;
    throw ValidationError("dataset", "unknown dataset '" + std::string(name) + "'");
}

std::string_view split_name(Split split) { return split == Split::kTrain ? "train" : "test"; }

Split parse_split(std::string_view name) {
    if (name == "train") return Split::kTrain;
    if (name == "test") return Split::kTest;
    throw ValidationError("split", "unknown split '" + std::string(name) + "'");
}

std::size_t DatasetManifest::total() const {
    std::size_t n = 0;
    for (const auto& [lang, count] : per_language_counts) n += count;
    return n;
}

void DatasetManifest::validate() const {
    std::size_t shard_total = 0;
    for (const auto& f : files) shard_total += f.samples;
    if (shard_total != total()) {
        throw ValidationError("per_language_counts", "does not sum to the shard sample counts");
    }
    if (input_samples != total() + exact_dups_removed + near_dups_removed) {
        throw ValidationError("input_samples", "does not equal survivors plus removed duplicates");
    }
}

nlohmann::ordered_json manifest_to_json(const DatasetManifest& m) {
    nlohmann::ordered_json j;
    j["name"] = dataset_name(m.name);
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [lang, n] : m.per_language_counts) counts[std::string(language_code(lang))] = n;
    j["per_language_counts"] = counts;
    j["total_samples"] = m.total();
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : m.files) files.push_back({{"path", f.path}, {"samples", f.samples}, {"sha256", f.sha256}});
    j["files"] = files;
    j["dedup_report"] = {{"input_samples", m.input_samples},
                         {"exact_dups_removed", m.exact_dups_removed},
                         {"near_dups_removed", m.near_dups_removed}};
    j["leakage_report"] = leakage_to_json(m.leakage);
    j["created_at"] = m.created_at;
    j["config_digest"] = m.config_digest;
    return j;
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    try {
        m.name = parse_dataset_name(j.at("name").get<std::string>());
        for (const auto& [code, n] : j.at("per_language_counts").items()) {
            m.per_language_counts[parse_language(code)] = n.get<std::size_t>();
        }
        for (const auto& f : j.at("files")) {
            m.files.push_back(
                {f.at("path").get<std::string>(), f.at("samples").get<std::size_t>(), f.at("sha256").get<std::string>()});
        }
        const auto& d = j.at("dedup_report");
        m.input_samples = d.at("input_samples").get<std::size_t>();
        m.exact_dups_removed = d.at("exact_dups_removed").get<std::size_t>();
        m.near_dups_removed = d.at("near_dups_removed").get<std::size_t>();
        m.leakage = leakage_from_json(j.at("leakage_report"));
        m.created_at = j.at("created_at").get<std::string>();
        m.config_digest = j.at("config_digest").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest", e.what());
    }
    m.validate();
    return m;
}

std::string serialize_manifest(const DatasetManifest& manifest) { return manifest_to_json(manifest).dump(2) + "\n"; }

DatasetManifest load_manifest(const fs::path& path) {
    const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw FormatError(path.string() + ": manifest is not valid JSON");
    return manifest_from_json(j);
}

AssemblySpec assembly_spec_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    AssemblySpec spec;
    try {
        for (const auto& in : j.at("inputs")) {
            AssemblyInput input;
            input.path = in.at("path").get<std::string>();
            if (input.path.is_relative()) input.path = base_dir / input.path;
            input.lang = parse_language(in.at("lang").get<std::string>());
            input.dataset = parse_dataset_name(in.at("dataset").get<std::string>());
            input.split = parse_split(in.value("split", std::string("train")));
            spec.inputs.push_back(std::move(input));
        }
        if (auto it = j.find("created_at"); it != j.end() && !it->is_null()) spec.created_at = it->get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("assembly spec: ") + e.what());
    } catch (const ValidationError& e) {
        throw ConfigError("assembly spec: " + std::string(e.what()));
    }
    return spec;
}

AssemblySpec load_assembly_spec(const fs::path& path) {
    const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw ConfigError(path.string() + ": assembly spec is not valid JSON");
    return assembly_spec_from_json(j, path.parent_path());
}

AssemblyResult assemble(const AssemblySpec& spec, const PipelineConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    DirectoryLock lock(out_dir / ".assemble.lock");

    std::vector<std::vector<DataSample>> loaded(spec.inputs.size());
    parallel_for(spec.inputs.size(), cfg.concurrency_limit, [&](std::size_t i) {
        const auto& input = spec.inputs[i];
        loaded[i] = read_samples(input.path);
        for (const auto& s : loaded[i]) {
            if (s.lang != input.lang) {
                throw ValidationError("lang", input.path.string() + ": sample '" + s.id + "' is " +
                                                  std::string(language_code(s.lang)) + ", input declared " +
                                                  std::string(language_code(input.lang)));
            }
            if (input.dataset == DatasetName::kMmedIftMc && s.kind != SampleKind::kMultipleChoiceQa) {
                throw ValidationError("kind", input.path.string() + ": sample '" + s.id +
                                                  "' is not multiple_choice_qa");
            }
        }
    });

    std::vector<DataSample> ift_in, mc_in, mc_test;
    for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
        const auto& input = spec.inputs[i];
        auto& dest = input.split == Split::kTest ? mc_test : (input.dataset == DatasetName::kMmedIft ? ift_in : mc_in);
        if (input.split == Split::kTest && input.dataset != DatasetName::kMmedIftMc) {
            throw ValidationError("split", input.path.string() + ": only mmed_ift_mc inputs may be test split");
        }
        for (auto& s : loaded[i]) dest.push_back(std::move(s));
    }
    for (const auto* stream : {&ift_in, &mc_in}) {
        std::set<std::string_view> ids;
        for (const auto& s : *stream) {
            if (!ids.insert(s.id).second) throw ValidationError("id", "duplicate id '" + s.id + "' across inputs");
        }
    }

    AssemblyResult result;
    std::vector<DataSample> ift_unique, mc_unique;
    result.ift = build_dataset(DatasetName::kMmedIft, std::move(ift_in), cfg, out_dir, ift_unique);
    result.mc = build_dataset(DatasetName::kMmedIftMc, std::move(mc_in), cfg, out_dir, mc_unique);

    LeakageReport leakage;
    leakage.probes_per_language = cfg.probes_per_language;
    leakage.seed = cfg.seed;
    if (!ift_unique.empty() && (!mc_unique.empty() || !mc_test.empty())) {
        leakage = check_leakage(ift_unique, mc_unique, mc_test, cfg.probes_per_language, cfg.seed, cfg.dedup);
    }

    const std::string created_at = resolve_created_at(spec);
    const std::string digest = config_digest(cfg);
    for (auto* m : {&result.ift, &result.mc}) {
        m->leakage = leakage;
        m->created_at = created_at;
        m->config_digest = digest;
        m->validate();
    }
    result.ift_manifest_path = out_dir / "mmed_ift.manifest.json";
    result.mc_manifest_path = out_dir / "mmed_ift_mc.manifest.json";
    write_file_atomic(result.ift_manifest_path, serialize_manifest(result.ift));
    write_file_atomic(result.mc_manifest_path, serialize_manifest(result.mc));
    return result;
}

std::string format_utc(std::int64_t epoch_seconds) {
    const std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace mifc
