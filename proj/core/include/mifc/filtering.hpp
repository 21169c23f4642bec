#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mifc/language.hpp"
#include "mifc/sample.hpp"

namespace mifc {

enum class MatchMode {
    kWordBoundary,  // case-insensitive, occurrence must sit between word boundaries
    kSubstring,     // case-insensitive raw substring; for scripts without spaces
};

std::string_view match_mode_name(MatchMode mode);
MatchMode parse_match_mode(std::string_view name);

/// Substring for ZH/JA/KO, word boundaries elsewhere.
MatchMode default_match_mode(Language lang);

struct FilterConfig {
    std::vector<std::string> keywords;
    /// Keep requires density R > thres1.
    double thres1 = 0.05;
    /// Keep requires unique keyword count > thres2.
    std::int64_t thres2 = 2;
    /// Unset means "pick per sample language" via default_match_mode.
    std::optional<MatchMode> match_mode;

    /// Throws ConfigError when the keyword list is empty, has blank entries, or
    /// thresholds are out of range.
    void validate() const;
};

struct KeywordCount {
    std::string keyword;
    std::size_t count = 0;

    bool operator==(const KeywordCount&) const = default;
};

/// Knowledge-density statistics for one text.
///
///   ratio = sum_k len(k) * cnt(k, T) / len(T)
///
/// with lengths in Unicode scalar values and cnt counted non-overlapping,
/// left to right, per keyword.
struct FilterReport {
    double ratio = 0.0;
    std::size_t unique_keywords = 0;
    std::vector<KeywordCount> matched;  // only keywords with cnt > 0, in list order
    std::size_t covered_length = 0;     // the numerator
    std::size_t text_length = 0;
    bool kept = false;
};

/// Multi-pattern matcher built once per keyword list and shared read-only
/// across worker threads.
class KeywordScorer {
public:
    explicit KeywordScorer(const FilterConfig& cfg);
    ~KeywordScorer();
    KeywordScorer(KeywordScorer&&) noexcept;
    KeywordScorer& operator=(KeywordScorer&&) noexcept;

    /// Throws ValidationError("text") on empty text.
    FilterReport score(std::string_view text, MatchMode mode) const;

    const FilterConfig& config() const { return cfg_; }

private:
    struct Automaton;
    FilterConfig cfg_;
    std::unique_ptr<Automaton> automaton_;
};

FilterReport score_sample(std::string_view text, const FilterConfig& cfg, MatchMode mode);

/// Uses cfg.match_mode, falling back to word-boundary matching.
FilterReport score_sample(std::string_view text, const FilterConfig& cfg);

struct FilterPartition {
    std::vector<DataSample> kept;
    std::vector<DataSample> rejected;
};

/// Scores every sample (raw_text, or question + " " + answer) and splits the
/// stream. Each sample gets `filter.R`, `filter.uni_k`, `filter.kept`; samples
/// that cannot be scored go to `rejected` with `filter.error`. Input order is
/// preserved in both outputs regardless of `workers`.
FilterPartition filter_stream(std::vector<DataSample> input, const FilterConfig& cfg,
                              std::size_t workers = 1);

}  // namespace mifc
