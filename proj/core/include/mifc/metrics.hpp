#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mifc/tokenize.hpp"

namespace mifc {

inline constexpr std::size_t kMaxNgram = 4;

/// Raw sentence-level n-gram statistics for n = 1..4.
struct NgramStats {
    std::array<std::size_t, kMaxNgram> clipped{};  // sum over n-grams of min(cand count, ref count)
    std::array<std::size_t, kMaxNgram> total{};    // candidate n-gram count
    std::size_t candidate_length = 0;
    std::size_t reference_length = 0;
};

NgramStats ngram_stats(std::span<const std::string> candidate, std::span<const std::string> reference);

struct BleuScore {
    /// BLEU_n = BP * p_n, p_n the (smoothed) clipped n-gram precision.
    std::array<double, kMaxNgram> per_n{};
    /// Equal-weight mean of per_n.
    double mean = 0.0;
    double brevity_penalty = 1.0;
    NgramStats stats;
};

/// Sentence-level BLEU-1..4 over pre-tokenized input.
///
/// p_1 = clipped_1 / total_1. For n >= 2, a zero clipped count is smoothed to
/// 1 / (total_n + 1) as long as at least one unigram matched; with no unigram
/// overlap every p_n stays 0. BP = min(1, exp(1 - r / c)) with r, c the
/// reference and candidate lengths. Throws ValidationError when either side is
/// empty.
BleuScore bleu_tokens(std::span<const std::string> candidate, std::span<const std::string> reference);

BleuScore bleu(std::string_view candidate, std::string_view reference, TokenizerMode mode);

/// Token embedding capability behind the similarity metric. Implementations
/// must return one unit-norm vector per token, all of the same dimension, and
/// must tolerate concurrent calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<double>> embed(std::span<const std::string> tokens) const = 0;
    virtual std::string name() const = 0;
};

/// Offline provider: each token hashes (FNV-1a, seeded) into a SplitMix64
/// stream that fills a vector, which is then normalised. Identical tokens map
/// to identical vectors; distinct tokens are nearly orthogonal in high
/// dimension.
class DeterministicEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit DeterministicEmbeddingProvider(std::size_t dim = 128, std::uint64_t seed = 0);
    std::vector<std::vector<double>> embed(std::span<const std::string> tokens) const override;
    std::string name() const override { return "test-deterministic"; }
    std::vector<double> embed_one(std::string_view token) const;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

struct SimilarityBreakdown {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Greedy matching over a cosine matrix: precision averages, for each
/// candidate vector, its best cosine against the reference; recall is the
/// mirror image. F1 is the harmonic mean and is 0 unless both are positive.
SimilarityBreakdown greedy_match(const std::vector<std::vector<double>>& candidate,
                                 const std::vector<std::vector<double>>& reference);

/// Embedding-similarity F1 (no IDF weighting, no baseline rescaling).
SimilarityBreakdown embed_similarity_breakdown(std::string_view candidate, std::string_view reference,
                                               const EmbeddingProvider& provider, TokenizerMode mode);
double embed_similarity(std::string_view candidate, std::string_view reference,
                        const EmbeddingProvider& provider, TokenizerMode mode);

struct CctsConfig {
    double lambda1 = 0.5;
    double lambda2 = 0.5;
    /// Round trips scoring strictly above this are accepted.
    double accept_threshold = 0.8;
    /// Unset means "by source language" via default_tokenizer_mode.
    std::optional<TokenizerMode> tokenizer_mode;

    void validate() const;
};

struct CctsBreakdown {
    BleuScore bleu;
    double embed = 0.0;
    double score = 0.0;
};

/// Cycle-consistency translation score between a source text and its
/// back-translation:
///
///   score = lambda1 * mean(BLEU_1..4)(x, x_hat) + lambda2 * embed(x, x_hat)
CctsBreakdown ccts_breakdown(std::string_view source, std::string_view back_translation,
                             const CctsConfig& cfg, const EmbeddingProvider& provider,
                             TokenizerMode mode);

/// Uses cfg.tokenizer_mode, falling back to whitespace tokenization.
double ccts(std::string_view source, std::string_view back_translation, const CctsConfig& cfg,
            const EmbeddingProvider& provider);

}  // namespace mifc
