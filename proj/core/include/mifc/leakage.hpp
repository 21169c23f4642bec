#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mifc/dedup.hpp"
#include "mifc/sample.hpp"

namespace mifc {

struct LeakageCollision {
    std::string probe_id;
    /// "mc_train" or "mc_test"
    std::string set;
    std::string sample_id;
    /// "exact" or "near"
    std::string match_kind;

    bool operator==(const LeakageCollision&) const = default;
};

struct ProbeShortfall {
    Language lang;
    std::size_t requested = 0;
    std::size_t available = 0;

    bool operator==(const ProbeShortfall&) const = default;
};

struct LeakageReport {
    bool performed = false;
    std::size_t probes_per_language = 0;
    std::uint64_t seed = 0;
    /// Probe ids per language, in input order.
    std::map<Language, std::vector<std::string>> probes;
    std::vector<LeakageCollision> collisions;
    std::vector<ProbeShortfall> shortfalls;

    bool pass() const { return collisions.empty(); }
    bool operator==(const LeakageReport&) const = default;
};

/// Indices of `count` distinct draws from [0, n) (all of them when count >= n),
/// ascending. Partial Fisher-Yates over a seeded 64-bit Mersenne Twister.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::uint64_t seed);

/// Draws up to probes_per_language samples per language from `ift` with a
/// seeded generator and compares each against both MC sets, by normalised
/// exact key and by shingle Jaccard. Languages are visited in tag order so the
/// draw is a pure function of (inputs, seed).
LeakageReport check_leakage(std::span<const DataSample> ift, std::span<const DataSample> mc_train,
                            std::span<const DataSample> mc_test, std::size_t probes_per_language,
                            std::uint64_t seed, const DedupConfig& cfg = {});

nlohmann::ordered_json leakage_to_json(const LeakageReport& report);
LeakageReport leakage_from_json(const nlohmann::json& j);

}  // namespace mifc
