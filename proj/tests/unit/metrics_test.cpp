#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "mifc/error.hpp"
#include "mifc/metrics.hpp"

namespace mifc {
namespace {

using Tokens = std::vector<std::string>;

// Brute-force modified precision: every distinct candidate n-gram counted by
// direct scanning of both sides.
std::pair<std::size_t, std::size_t> brute_clipped(const Tokens& cand, const Tokens& ref, std::size_t n) {
    auto count_in = [&](const Tokens& side, const Tokens& gram) {
        std::size_t c = 0;
        for (std::size_t i = 0; i + n <= side.size(); ++i) {
            if (std::equal(gram.begin(), gram.end(), side.begin() + static_cast<long>(i))) ++c;
        }
        return c;
    };
    std::vector<Tokens> distinct;
    std::size_t total = 0;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
        ++total;
        Tokens g(cand.begin() + static_cast<long>(i), cand.begin() + static_cast<long>(i + n));
        if (std::find(distinct.begin(), distinct.end(), g) == distinct.end()) distinct.push_back(g);
    }
    std::size_t clipped = 0;
    for (const auto& g : distinct) clipped += std::min(count_in(cand, g), count_in(ref, g));
    return {clipped, total};
}

std::array<double, 4> brute_bleu(const Tokens& cand, const Tokens& ref) {
    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
    std::array<double, 4> out{};
    const auto [m1, t1] = brute_clipped(cand, ref, 1);
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto [m, t] = brute_clipped(cand, ref, n);
        double p = 0.0;
        if (m > 0) {
            p = static_cast<double>(m) / static_cast<double>(t);
        } else if (n > 1 && m1 > 0) {
            p = 1.0 / (static_cast<double>(t) + 1.0);
        }
        out[n - 1] = bp * p;
    }
    return out;
}

std::vector<Tokens> all_sequences(std::size_t max_len, const Tokens& vocab) {
    std::vector<Tokens> out;
    std::vector<Tokens> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<Tokens> next;
        for (const auto& seq : frontier) {
            for (const auto& w : vocab) {
                Tokens s = seq;
                s.push_back(w);
                next.push_back(s);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

TEST(Bleu, MatchesBruteForceOnSmallSequences) {
    const auto seqs = all_sequences(4, {"a", "b", "c"});
    for (const auto& cand : seqs) {
        for (const auto& ref : seqs) {
            const auto got = bleu_tokens(cand, ref);
            const auto want = brute_bleu(cand, ref);
            for (std::size_t n = 0; n < 4; ++n) {
                const auto [m, t] = brute_clipped(cand, ref, n + 1);
                ASSERT_EQ(got.stats.clipped[n], m);
                ASSERT_EQ(got.stats.total[n], t);
                ASSERT_NEAR(got.per_n[n], want[n], 1e-12);
            }
        }
    }
}

TEST(Bleu, IdentityScoresOne) {
    for (const auto& seq : all_sequences(5, {"x", "y"})) {
        ASSERT_DOUBLE_EQ(bleu_tokens(seq, seq).mean, 1.0);
    }
    EXPECT_DOUBLE_EQ(bleu("Metformin lowers blood glucose.", "Metformin lowers blood glucose.",
                          TokenizerMode::kWhitespace)
                         .mean,
                     1.0);
}

TEST(Bleu, NoSharedUnigramScoresZero) {
    const auto s = bleu("alpha beta gamma", "delta epsilon", TokenizerMode::kWhitespace);
    EXPECT_EQ(s.mean, 0.0);
    for (double p : s.per_n) EXPECT_EQ(p, 0.0);
}

TEST(Bleu, ClippedUnigramPrecision) {
    const auto s = bleu("the the the the", "the cat", TokenizerMode::kWhitespace);
    EXPECT_EQ(s.stats.clipped[0], 1u);
    EXPECT_EQ(s.stats.total[0], 4u);
    EXPECT_DOUBLE_EQ(s.per_n[0], 0.25);
}

TEST(Bleu, BrevityPenaltyForShortCandidates) {
    const auto s = bleu("a b", "a b c d", TokenizerMode::kWhitespace);
    EXPECT_DOUBLE_EQ(s.brevity_penalty, std::exp(1.0 - 4.0 / 2.0));
    EXPECT_DOUBLE_EQ(s.per_n[0], s.brevity_penalty);
}

TEST(Bleu, IsDirectional) {
    const auto ab = bleu("a b c", "a b c d e", TokenizerMode::kWhitespace).mean;
    const auto ba = bleu("a b c d e", "a b c", TokenizerMode::kWhitespace).mean;
    EXPECT_NE(ab, ba);
}

TEST(Bleu, EmptyInputIsValidationError) {
    EXPECT_THROW(bleu("", "a", TokenizerMode::kWhitespace), ValidationError);
    EXPECT_THROW(bleu("a", "   ", TokenizerMode::kWhitespace), ValidationError);
}

TEST(Bleu, CharacterModeForUnsegmentedScripts) {
    const auto s = bleu("糖尿病患者", "糖尿病", TokenizerMode::kCharacter);
    EXPECT_EQ(s.stats.total[0], 5u);
    EXPECT_EQ(s.stats.clipped[0], 3u);
}

TEST(Tokenize, SplitsPunctuationInWhitespaceMode) {
    EXPECT_EQ(tokenize("Hello, world!", TokenizerMode::kWhitespace), (Tokens{"Hello", ",", "world", "!"}));
    EXPECT_EQ(tokenize("당뇨 병", TokenizerMode::kCharacter), (Tokens{"당", "뇨", "병"}));
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / std::sqrt(na * nb);
}

TEST(Embedding, DeterministicProviderReturnsUnitVectors) {
    const DeterministicEmbeddingProvider p(64, 3);
    const Tokens toks{"insulin", "glucose", "insulin", "糖"};
    const auto v = p.embed(toks);
    ASSERT_EQ(v.size(), toks.size());
    for (const auto& e : v) {
        ASSERT_EQ(e.size(), 64u);
        double n = 0;
        for (double x : e) n += x * x;
        EXPECT_NEAR(std::sqrt(n), 1.0, 1e-9);
    }
    EXPECT_EQ(v[0], v[2]);
    EXPECT_NE(v[0], v[1]);
    EXPECT_NE(DeterministicEmbeddingProvider(64, 4).embed_one("insulin"), v[0]);
}

TEST(Embedding, SelfSimilarityIsOne) {
    const DeterministicEmbeddingProvider p;
    EXPECT_NEAR(embed_similarity("Renal failure raises creatinine.", "Renal failure raises creatinine.", p,
                                 TokenizerMode::kWhitespace),
                1.0, 1e-6);
}

class AxisProvider final : public EmbeddingProvider {
public:
    std::vector<std::vector<double>> embed(std::span<const std::string> tokens) const override {
        std::vector<std::vector<double>> out;
        for (const auto& t : tokens) out.push_back(t == "x" ? std::vector<double>{1, 0} : std::vector<double>{0, 1});
        return out;
    }
    std::string name() const override { return "axis"; }
};

TEST(Embedding, OrthogonalSingleTokensScoreZero) {
    const AxisProvider p;
    EXPECT_EQ(embed_similarity("x", "y", p, TokenizerMode::kWhitespace), 0.0);
}

TEST(Embedding, MatchesCosineMatrixOracle) {
    const DeterministicEmbeddingProvider p;
    const Tokens cand{"fever", "cough", "fatigue"};
    const Tokens ref{"cough", "headache"};
    double precision = 0, recall = 0;
    for (const auto& c : cand) {
        double best = -2;
        for (const auto& r : ref) best = std::max(best, cosine(p.embed_one(c), p.embed_one(r)));
        precision += best / 3.0;
    }
    for (const auto& r : ref) {
        double best = -2;
        for (const auto& c : cand) best = std::max(best, cosine(p.embed_one(c), p.embed_one(r)));
        recall += best / 2.0;
    }
    const double f1 = 2 * precision * recall / (precision + recall);
    const auto got = embed_similarity_breakdown("fever cough fatigue", "cough headache", p, TokenizerMode::kWhitespace);
    EXPECT_NEAR(got.precision, precision, 1e-12);
    EXPECT_NEAR(got.recall, recall, 1e-12);
    EXPECT_NEAR(got.f1, f1, 1e-12);
}

TEST(Ccts, IdentityRoundTripScoresOne) {
    const DeterministicEmbeddingProvider p;
    const CctsConfig cfg;
    EXPECT_NEAR(ccts("Aspirin inhibits platelet aggregation.", "Aspirin inhibits platelet aggregation.", cfg, p), 1.0,
                1e-9);
}

TEST(Ccts, WeightsSelectComponents) {
    const DeterministicEmbeddingProvider p;
    const std::string x = "Aspirin inhibits platelet aggregation in most adults.";
    const std::string xh = "Aspirin blocks platelet clumping in adults.";
    CctsConfig bleu_only;
    bleu_only.lambda1 = 1.0;
    bleu_only.lambda2 = 0.0;
    const auto b = ccts_breakdown(x, xh, bleu_only, p, TokenizerMode::kWhitespace);
    EXPECT_EQ(b.score, bleu(xh, x, TokenizerMode::kWhitespace).mean);

    CctsConfig half;
    const auto h = ccts_breakdown(x, xh, half, p, TokenizerMode::kWhitespace);
    EXPECT_NEAR(h.score, 0.5 * h.bleu.mean + 0.5 * embed_similarity(xh, x, p, TokenizerMode::kWhitespace), 1e-12);

    CctsConfig doubled = half;
    doubled.lambda1 = 1.0;
    const auto d = ccts_breakdown(x, xh, doubled, p, TokenizerMode::kWhitespace);
    EXPECT_NEAR(d.score - 0.5 * d.embed, 2 * (h.score - 0.5 * h.embed), 1e-12);
}

TEST(Ccts, InvalidWeightsAreConfigErrors) {
    CctsConfig cfg;
    cfg.lambda1 = 0;
    cfg.lambda2 = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.lambda1 = -1;
    cfg.lambda2 = 2;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace mifc
