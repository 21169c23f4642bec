#include "mifc/leakage.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "mifc/error.hpp"

namespace mifc {

namespace {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t reject_below = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= reject_below) return r % bound;
    }
}

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Target {
    const char* name;
    std::span<const DataSample> samples;
    std::unordered_map<std::string, std::size_t> exact;
    NearDupIndex index;
    std::vector<std::size_t> slot_sample;

    Target(const char* n, std::span<const DataSample> s, const DedupConfig& cfg)
        : name(n), samples(s), index(cfg.near_dup_threshold) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::string key = dedup_key(s[i]);
            index.add(shingles(key, cfg.shingle_size));
            slot_sample.push_back(i);
            exact.emplace(std::move(key), i);
        }
    }
};

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (count >= n) return idx;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

LeakageReport check_leakage(std::span<const DataSample> ift, std::span<const DataSample> mc_train,
                            std::span<const DataSample> mc_test, std::size_t probes_per_language,
                            std::uint64_t seed, const DedupConfig& cfg) {
    if (probes_per_language == 0) throw ValidationError("probes_per_language", "must be >= 1");
    cfg.validate();

    LeakageReport report;
    report.performed = true;
    report.probes_per_language = probes_per_language;
    report.seed = seed;

    Target targets[] = {{"mc_train", mc_train, cfg}, {"mc_test", mc_test, cfg}};

    for (std::size_t li = 0; li < kAllLanguages.size(); ++li) {
        const Language lang = kAllLanguages[li];
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < ift.size(); ++i) {
            if (ift[i].lang == lang) pool.push_back(i);
        }
        if (pool.empty()) continue;
        if (pool.size() < probes_per_language) {
            report.shortfalls.push_back({lang, probes_per_language, pool.size()});
        }
        auto& ids = report.probes[lang];
        for (std::size_t k : sample_indices(pool.size(), probes_per_language, mix(seed ^ li))) {
            const DataSample& probe = ift[pool[k]];
            ids.push_back(probe.id);
            const std::string key = dedup_key(probe);
            const auto set = shingles(key, cfg.shingle_size);
            for (auto& target : targets) {
                if (auto it = target.exact.find(key); it != target.exact.end()) {
                    report.collisions.push_back({probe.id, target.name, target.samples[it->second].id, "exact"});
                    continue;
                }
                for (std::size_t slot : target.index.query(set)) {
                    report.collisions.push_back(
                        {probe.id, target.name, target.samples[target.slot_sample[slot]].id, "near"});
                }
            }
        }
    }
    return report;
}

nlohmann::ordered_json leakage_to_json(const LeakageReport& report) {
    nlohmann::ordered_json j;
    j["performed"] = report.performed;
    j["probes_per_language"] = report.probes_per_language;
    j["seed"] = report.seed;
    nlohmann::ordered_json probes = nlohmann::ordered_json::object();
    for (const auto& [lang, ids] : report.probes) probes[std::string(language_code(lang))] = ids;
    j["probes"] = probes;
    nlohmann::ordered_json collisions = nlohmann::ordered_json::array();
    for (const auto& c : report.collisions) {
        collisions.push_back(
            {{"probe_id", c.probe_id}, {"set", c.set}, {"sample_id", c.sample_id}, {"match_kind", c.match_kind}});
    }
    j["collisions"] = collisions;
    nlohmann::ordered_json shortfalls = nlohmann::ordered_json::array();
    for (const auto& s : report.shortfalls) {
        shortfalls.push_back(
            {{"lang", language_code(s.lang)}, {"requested", s.requested}, {"available", s.available}});
    }
    j["shortfalls"] = shortfalls;
    j["pass"] = report.pass();
    return j;
}

LeakageReport leakage_from_json(const nlohmann::json& j) {
    LeakageReport r;
    try {
        r.performed = j.at("performed").get<bool>();
        r.probes_per_language = j.at("probes_per_language").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [code, ids] : j.at("probes").items()) {
            r.probes[parse_language(code)] = ids.get<std::vector<std::string>>();
        }
        for (const auto& c : j.at("collisions")) {
            r.collisions.push_back({c.at("probe_id").get<std::string>(), c.at("set").get<std::string>(),
                                    c.at("sample_id").get<std::string>(), c.at("match_kind").get<std::string>()});
        }
        for (const auto& s : j.at("shortfalls")) {
            r.shortfalls.push_back({parse_language(s.at("lang").get<std::string>()),
                                    s.at("requested").get<std::size_t>(), s.at("available").get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("leakage_report", e.what());
    }
    return r;
}

}  // namespace mifc
