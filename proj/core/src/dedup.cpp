#include "mifc/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "mifc/error.hpp"
#include "mifc/parallel.hpp"
#include "mifc/utf8.hpp"

namespace mifc {

namespace {

void append_normalized(std::u32string& out, std::string_view text) {
    bool pending_space = false;
    for (char32_t cp : utf8::decode(text)) {
        if (utf8::is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(U' ');
        pending_space = false;
        out.push_back(utf8::to_lower(cp));
    }
}

template <class T>
std::size_t intersection_size(const std::vector<T>& a, const std::vector<T>& b) {
    std::size_t i = 0, j = 0, n = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++n, ++i, ++j;
        }
    }
    return n;
}

double ratio(std::size_t inter, std::size_t a, std::size_t b) {
    const std::size_t uni = a + b - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

void DedupConfig::validate() const {
    if (!(near_dup_threshold > 0.0 && near_dup_threshold <= 1.0)) {
        throw ConfigError("dedup.near_dup_threshold must be in (0, 1]");
    }
    if (shingle_size == 0) throw ConfigError("dedup.shingle_size must be positive");
}

std::string dedup_key(const DataSample& sample) {
    std::u32string out;
    auto add = [&](const std::optional<std::string>& field) {
        if (!field) return;
        if (!out.empty()) out.push_back(U' ');
        append_normalized(out, *field);
        while (!out.empty() && out.back() == U' ') out.pop_back();
    };
    if (sample.kind == SampleKind::kRawText) {
        add(sample.raw_text);
    } else {
        add(sample.question);
        if (sample.options) {
            for (const auto& opt : *sample.options) {
                add(opt.label);
                add(opt.text);
            }
        }
        add(sample.answer);
    }
    return utf8::encode(out);
}

std::vector<Shingle> shingles(std::string_view normalized_text, std::size_t size) {
    const std::u32string text = utf8::decode(normalized_text);
    std::vector<Shingle> out;
    if (size == 0 || text.size() <= size) {
        out.push_back(text);
        return out;
    }
    out.reserve(text.size() - size + 1);
    for (std::size_t i = 0; i + size <= text.size(); ++i) out.push_back(text.substr(i, size));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double jaccard(const std::vector<Shingle>& a, const std::vector<Shingle>& b) {
    return ratio(intersection_size(a, b), a.size(), b.size());
}

NearDupIndex::NearDupIndex(double threshold) : threshold_(threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("near-dup threshold must be in (0, 1]");
}

std::size_t NearDupIndex::prefix_length(std::size_t set_size) const {
    // Slightly under-estimating the required overlap only lengthens the prefix.
    const double need = std::ceil(threshold_ * static_cast<double>(set_size) - 1e-9);
    const std::size_t overlap = need < 1.0 ? 1 : static_cast<std::size_t>(need);
    if (overlap > set_size) return set_size;
    return std::min(set_size, set_size - overlap + 1);
}

// Fixed global order used for prefix filtering: hash first, then the code points.
std::vector<NearDupIndex::Keyed> NearDupIndex::keyed(const std::vector<Shingle>& set) {
    std::vector<Keyed> out;
    out.reserve(set.size());
    for (const auto& s : set) out.push_back({std::hash<Shingle>{}(s), s});
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t NearDupIndex::add(std::vector<Shingle> raw) {
    auto set = keyed(raw);
    const std::size_t slot = sets_.size();
    const std::size_t p = prefix_length(set.size());
    for (std::size_t i = 0; i < p; ++i) postings_[set[i].text].push_back(slot);
    sets_.push_back(std::move(set));
    return slot;
}

std::vector<std::size_t> NearDupIndex::query(const std::vector<Shingle>& set) const {
    const auto probe = keyed(set);
    std::vector<std::size_t> candidates;
    const std::size_t p = prefix_length(probe.size());
    for (std::size_t i = 0; i < p; ++i) {
        auto it = postings_.find(probe[i].text);
        if (it != postings_.end()) candidates.insert(candidates.end(), it->second.begin(), it->second.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<std::size_t> hits;
    for (std::size_t slot : candidates) {
        const auto& other = sets_[slot];
        // |A ∩ B| <= min(|A|, |B|), so a lopsided pair cannot reach the threshold.
        const auto lo = static_cast<double>(std::min(probe.size(), other.size()));
        const auto hi = static_cast<double>(std::max(probe.size(), other.size()));
        if (lo < threshold_ * hi - 1e-9) continue;
        const std::size_t inter = intersection_size(probe, other);
        if (ratio(inter, probe.size(), other.size()) >= threshold_) hits.push_back(slot);
    }
    return hits;
}

DedupResult dedup(std::vector<DataSample> samples, const DedupConfig& cfg, std::size_t workers) {
    cfg.validate();
    std::vector<std::string> keys(samples.size());
    std::vector<std::vector<Shingle>> sets(samples.size());
    parallel_for(samples.size(), workers, [&](std::size_t i) {
        keys[i] = dedup_key(samples[i]);
        sets[i] = shingles(keys[i], cfg.shingle_size);
    });

    DedupResult result;
    NearDupIndex index(cfg.near_dup_threshold);
    std::unordered_map<std::string, std::size_t> exact;
    std::vector<std::size_t> slot_owner;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (auto it = exact.find(keys[i]); it != exact.end()) {
            ++result.report.exact_dups_removed;
            result.report.removed.emplace_back(samples[i].id, result.unique[it->second].id);
            continue;
        }
        if (auto hits = index.query(sets[i]); !hits.empty()) {
            ++result.report.near_dups_removed;
            result.report.removed.emplace_back(samples[i].id, result.unique[slot_owner[hits.front()]].id);
            continue;
        }
        index.add(std::move(sets[i]));
        slot_owner.push_back(result.unique.size());
        exact.emplace(std::move(keys[i]), result.unique.size());
        result.unique.push_back(std::move(samples[i]));
    }
    return result;
}

}  // namespace mifc
