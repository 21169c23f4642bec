#include "mifc/filtering.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "mifc/error.hpp"
#include "mifc/parallel.hpp"
#include "mifc/utf8.hpp"

namespace mifc {

std::string_view match_mode_name(MatchMode mode) {
    return mode == MatchMode::kWordBoundary ? "word_boundary" : "substring";
}

MatchMode parse_match_mode(std::string_view name) {
    if (name == "word_boundary") return MatchMode::kWordBoundary;
    if (name == "substring") return MatchMode::kSubstring;
    throw ConfigError("unknown match_mode '" + std::string(name) + "'");
}

MatchMode default_match_mode(Language lang) {
    return is_unsegmented_script(lang) ? MatchMode::kSubstring : MatchMode::kWordBoundary;
}

void FilterConfig::validate() const {
    if (keywords.empty()) throw ConfigError("filter.keywords must not be empty");
    for (const auto& k : keywords) {
        if (utf8::trim(k).empty()) throw ConfigError("filter.keywords contains a blank entry");
        if (!utf8::is_valid(k)) throw ConfigError("filter.keywords contains invalid UTF-8");
    }
    if (!(thres1 >= 0.0 && thres1 <= 1.0)) throw ConfigError("filter.thres1 must be in [0, 1]");
    if (thres2 < 0) throw ConfigError("filter.thres2 must be non-negative");
}

// Aho-Corasick over case-folded scalar values. Keywords that fold to the same
// string are merged; the first spelling is the one reported.
struct KeywordScorer::Automaton {
    struct Node {
        std::unordered_map<char32_t, int> next;
        int fail = 0;
        int output = -1;       // keyword ending exactly here
        int dict_link = -1;    // nearest proper suffix node that ends a keyword
    };

    std::vector<Node> nodes{1};
    std::vector<std::size_t> lengths;       // per unique keyword
    std::vector<std::string> spellings;     // per unique keyword

    void add(const std::u32string& folded, std::string spelling) {
        int cur = 0;
        for (char32_t cp : folded) {
            auto it = nodes[cur].next.find(cp);
            if (it == nodes[cur].next.end()) {
                nodes.emplace_back();
                const int id = static_cast<int>(nodes.size()) - 1;
                nodes[cur].next.emplace(cp, id);
                cur = id;
            } else {
                cur = it->second;
            }
        }
        if (nodes[cur].output >= 0) return;
        nodes[cur].output = static_cast<int>(lengths.size());
        lengths.push_back(folded.size());
        spellings.push_back(std::move(spelling));
    }

    void build() {
        std::queue<int> q;
        for (auto& [cp, child] : nodes[0].next) {
            nodes[child].fail = 0;
            q.push(child);
        }
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (auto& [cp, v] : nodes[u].next) {
                int f = nodes[u].fail;
                while (f != 0 && !nodes[f].next.contains(cp)) f = nodes[f].fail;
                auto it = nodes[f].next.find(cp);
                nodes[v].fail = (it != nodes[f].next.end() && it->second != v) ? it->second : 0;
                const int fl = nodes[v].fail;
                nodes[v].dict_link = nodes[fl].output >= 0 ? fl : nodes[fl].dict_link;
                q.push(v);
            }
        }
    }

    int step(int state, char32_t cp) const {
        while (true) {
            auto it = nodes[state].next.find(cp);
            if (it != nodes[state].next.end()) return it->second;
            if (state == 0) return 0;
            state = nodes[state].fail;
        }
    }
};

KeywordScorer::KeywordScorer(const FilterConfig& cfg)
    : cfg_(cfg), automaton_(std::make_unique<Automaton>()) {
    cfg_.validate();
    for (const auto& k : cfg_.keywords) {
        const std::string trimmed(utf8::trim(k));
        automaton_->add(utf8::to_lower(utf8::decode(trimmed)), trimmed);
    }
    automaton_->build();
}

KeywordScorer::~KeywordScorer() = default;
KeywordScorer::KeywordScorer(KeywordScorer&&) noexcept = default;
KeywordScorer& KeywordScorer::operator=(KeywordScorer&&) noexcept = default;

FilterReport KeywordScorer::score(std::string_view text, MatchMode mode) const {
    const std::u32string decoded = utf8::decode(text);
    if (decoded.empty()) throw ValidationError("text", "empty text has no defined keyword density");
    const std::u32string folded = utf8::to_lower(decoded);
    const auto& ac = *automaton_;
    const std::size_t n = folded.size();

    std::vector<std::size_t> counts(ac.lengths.size(), 0);
    // End (exclusive) of the last counted occurrence, per keyword.
    std::vector<std::size_t> last_end(ac.lengths.size(), 0);

    auto boundary_ok = [&](std::size_t start, std::size_t end) {
        if (mode == MatchMode::kSubstring) return true;
        const bool left = start == 0 || !utf8::is_word_char(folded[start - 1]);
        const bool right = end == n || !utf8::is_word_char(folded[end]);
        return left && right;
    };

    // Occurrences surface in order of end position; for a fixed keyword that
    // is also start order, so greedy left-to-right selection is a single pass.
    int state = 0;
    for (std::size_t i = 0; i < n; ++i) {
        state = ac.step(state, folded[i]);
        for (int node = ac.nodes[state].output >= 0 ? state : ac.nodes[state].dict_link; node > 0;
             node = ac.nodes[node].dict_link) {
            const auto kw = static_cast<std::size_t>(ac.nodes[node].output);
            const std::size_t end = i + 1;
            const std::size_t start = end - ac.lengths[kw];
            if (start >= last_end[kw] && boundary_ok(start, end)) {
                ++counts[kw];
                last_end[kw] = end;
            }
        }
    }

    FilterReport report;
    report.text_length = n;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) continue;
        report.matched.push_back({ac.spellings[k], counts[k]});
        report.covered_length += ac.lengths[k] * counts[k];
    }
    report.unique_keywords = report.matched.size();
    report.ratio = static_cast<double>(report.covered_length) / static_cast<double>(n);
    report.kept = report.ratio > cfg_.thres1 &&
                  static_cast<std::int64_t>(report.unique_keywords) > cfg_.thres2;
    return report;
}

FilterReport score_sample(std::string_view text, const FilterConfig& cfg, MatchMode mode) {
    return KeywordScorer(cfg).score(text, mode);
}

FilterReport score_sample(std::string_view text, const FilterConfig& cfg) {
    return score_sample(text, cfg, cfg.match_mode.value_or(MatchMode::kWordBoundary));
}

FilterPartition filter_stream(std::vector<DataSample> input, const FilterConfig& cfg,
                              std::size_t workers) {
    const KeywordScorer scorer(cfg);
    std::vector<char> kept(input.size(), 0);
    parallel_for(input.size(), workers, [&](std::size_t i) {
        DataSample& s = input[i];
        try {
            const MatchMode mode = cfg.match_mode.value_or(default_match_mode(s.lang));
            const FilterReport r = scorer.score(filter_text(s), mode);
            annotate(s, "filter.R", r.ratio);
            annotate(s, "filter.uni_k", static_cast<std::int64_t>(r.unique_keywords));
            annotate(s, "filter.kept", r.kept);
            kept[i] = r.kept ? 1 : 0;
        } catch (const Error& e) {
            annotate(s, "filter.kept", false);
            annotate(s, "filter.error", std::string(e.what()));
        }
    });
    FilterPartition out;
    for (std::size_t i = 0; i < input.size(); ++i) {
        (kept[i] ? out.kept : out.rejected).push_back(std::move(input[i]));
    }
    return out;
}

}  // namespace mifc
