#include "mifc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mifc/error.hpp"

namespace mifc {
namespace {

// Token ids fit in 16 bits for any sentence we score; four of them pack into
// one 64-bit key.
using NgramKey = std::uint64_t;

std::vector<NgramKey> collect_ngrams(const std::vector<std::uint32_t>& ids, std::size_t n) {
    std::vector<NgramKey> out;
    if (ids.size() < n) return out;
    out.reserve(ids.size() - n + 1);
    for (std::size_t i = 0; i + n <= ids.size(); ++i) {
        NgramKey key = 0;
        for (std::size_t k = 0; k < n; ++k) key = (key << 16) | (ids[i + k] + 1);
        out.push_back(key);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Both inputs sorted; sum over distinct keys of min(count_a, count_b).
std::size_t clipped_overlap(const std::vector<NgramKey>& cand, const std::vector<NgramKey>& ref) {
    std::size_t clipped = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < cand.size() && j < ref.size()) {
        if (cand[i] < ref[j]) {
            ++i;
        } else if (ref[j] < cand[i]) {
            ++j;
        } else {
            ++clipped;
            ++i;
            ++j;
        }
    }
    return clipped;
}

}  // namespace

NgramStats ngram_stats(std::span<const std::string> candidate, std::span<const std::string> reference) {
    std::unordered_map<std::string_view, std::uint32_t> vocab;
    auto to_ids = [&](std::span<const std::string> tokens) {
        std::vector<std::uint32_t> ids;
        ids.reserve(tokens.size());
        for (const auto& t : tokens) {
            auto [it, inserted] = vocab.try_emplace(t, static_cast<std::uint32_t>(vocab.size()));
            ids.push_back(it->second);
        }
        return ids;
    };
    const auto cand_ids = to_ids(candidate);
    const auto ref_ids = to_ids(reference);
    if (vocab.size() >= 0xFFFF) throw ValidationError("text", "too many distinct tokens for sentence BLEU");

    NgramStats stats;
    stats.candidate_length = candidate.size();
    stats.reference_length = reference.size();
    for (std::size_t n = 1; n <= kMaxNgram; ++n) {
        const auto cand = collect_ngrams(cand_ids, n);
        const auto ref = collect_ngrams(ref_ids, n);
        stats.total[n - 1] = cand.size();
        stats.clipped[n - 1] = clipped_overlap(cand, ref);
    }
    return stats;
}

BleuScore bleu_tokens(std::span<const std::string> candidate, std::span<const std::string> reference) {
    if (candidate.empty()) throw ValidationError("candidate", "no tokens after tokenization");
    if (reference.empty()) throw ValidationError("reference", "no tokens after tokenization");

    BleuScore score;
    score.stats = ngram_stats(candidate, reference);
    const auto& st = score.stats;
    const double c = static_cast<double>(st.candidate_length);
    const double r = static_cast<double>(st.reference_length);
    score.brevity_penalty = c >= r ? 1.0 : std::exp(1.0 - r / c);

    const bool any_unigram = st.clipped[0] > 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < kMaxNgram; ++k) {
        double precision = 0.0;
        if (st.clipped[k] > 0) {
            precision = static_cast<double>(st.clipped[k]) / static_cast<double>(st.total[k]);
        } else if (k > 0 && any_unigram) {
            precision = 1.0 / (static_cast<double>(st.total[k]) + 1.0);
        }
        score.per_n[k] = score.brevity_penalty * precision;
        sum += score.per_n[k];
    }
    score.mean = sum / static_cast<double>(kMaxNgram);
    return score;
}

BleuScore bleu(std::string_view candidate, std::string_view reference, TokenizerMode mode) {
    const auto cand = tokenize(candidate, mode);
    const auto ref = tokenize(reference, mode);
    return bleu_tokens(cand, ref);
}

}  // namespace mifc
