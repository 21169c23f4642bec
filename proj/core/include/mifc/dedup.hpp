#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mifc/sample.hpp"

namespace mifc {

struct DedupConfig {
    /// Near-duplicate when character shingle Jaccard >= this.
    double near_dup_threshold = 0.9;
    std::size_t shingle_size = 5;

    void validate() const;
};

/// Text a sample is compared on: raw_text, or question [+ options] + answer,
/// lower-cased with whitespace runs collapsed to one space and trimmed.
std::string dedup_key(const DataSample& sample);

/// Character shingles of a normalised text, deduplicated and sorted. Texts
/// shorter than one shingle yield a single shingle holding the whole text.
using Shingle = std::u32string;
std::vector<Shingle> shingles(std::string_view normalized_text, std::size_t size);

/// |a ∩ b| / |a ∪ b| over sorted unique shingle lists.
double jaccard(const std::vector<Shingle>& a, const std::vector<Shingle>& b);

/// Exact near-duplicate index (prefix filtering under a fixed shingle order,
/// then exact verification). Queries return every indexed set whose Jaccard
/// with the probe reaches the threshold; no approximation is involved.
class NearDupIndex {
public:
    NearDupIndex(double threshold);

    /// Returns the slot assigned to the set.
    std::size_t add(std::vector<Shingle> set);

    /// Slots of indexed sets with Jaccard >= threshold, ascending.
    std::vector<std::size_t> query(const std::vector<Shingle>& set) const;

    std::size_t size() const { return sets_.size(); }

private:
    struct Keyed {
        std::size_t hash;
        Shingle text;
        bool operator<(const Keyed& o) const { return hash != o.hash ? hash < o.hash : text < o.text; }
        bool operator==(const Keyed& o) const { return hash == o.hash && text == o.text; }
    };
    static std::vector<Keyed> keyed(const std::vector<Shingle>& set);
    std::size_t prefix_length(std::size_t set_size) const;

    double threshold_;
    std::vector<std::vector<Keyed>> sets_;  // each sorted by (hash, text)
    std::unordered_map<Shingle, std::vector<std::size_t>> postings_;
};

struct DedupReport {
    std::size_t exact_dups_removed = 0;
    std::size_t near_dups_removed = 0;
    /// (removed id, surviving id it duplicated)
    std::vector<std::pair<std::string, std::string>> removed;
};

struct DedupResult {
    std::vector<DataSample> unique;
    DedupReport report;
};

/// First occurrence wins; survivors keep input order. A sample is an exact
/// duplicate when its dedup_key equals an earlier survivor's, otherwise a near
/// duplicate when its shingle Jaccard with any earlier survivor reaches the
/// threshold.
DedupResult dedup(std::vector<DataSample> samples, const DedupConfig& cfg = {}, std::size_t workers = 1);

}  // namespace mifc
