#include "mifc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mifc/error.hpp"

namespace mifc {
namespace {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

void check_embeddings(const std::vector<std::vector<double>>& vecs, std::size_t expected,
                      const char* side, std::size_t& dim) {
    if (vecs.size() != expected) {
        throw TransportError(std::string("embedding provider returned wrong vector count for ") + side);
    }
    for (const auto& v : vecs) {
        if (v.empty()) throw TransportError("embedding provider returned an empty vector");
        if (dim == 0) dim = v.size();
        if (v.size() != dim) throw TransportError("embedding provider returned mixed dimensions");
    }
}

}  // namespace

DeterministicEmbeddingProvider::DeterministicEmbeddingProvider(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::vector<double> DeterministicEmbeddingProvider::embed_one(std::string_view token) const {
    std::uint64_t state = fnv1a(token, seed_);
    std::vector<double> v(dim_);
    double norm2 = 0.0;
    for (double& x : v) {
        // 53 random bits mapped to [-1, 1).
        x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

std::vector<std::vector<double>> DeterministicEmbeddingProvider::embed(std::span<const std::string> tokens) const {
    std::vector<std::vector<double>> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(embed_one(t));
    return out;
}

SimilarityBreakdown greedy_match(const std::vector<std::vector<double>>& candidate,
                                 const std::vector<std::vector<double>>& reference) {
    if (candidate.empty()) throw ValidationError("candidate", "no tokens after tokenization");
    if (reference.empty()) throw ValidationError("reference", "no tokens after tokenization");

    std::vector<double> best_for_ref(reference.size(), -std::numeric_limits<double>::infinity());
    double precision_sum = 0.0;
    for (const auto& c : candidate) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < reference.size(); ++j) {
            const double cos = cosine(c, reference[j]);
            best = std::max(best, cos);
            best_for_ref[j] = std::max(best_for_ref[j], cos);
        }
        precision_sum += best;
    }
    double recall_sum = 0.0;
    for (double b : best_for_ref) recall_sum += b;

    SimilarityBreakdown out;
    out.precision = precision_sum / static_cast<double>(candidate.size());
    out.recall = recall_sum / static_cast<double>(reference.size());
    if (out.precision > 0.0 && out.recall > 0.0) {
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
}

SimilarityBreakdown embed_similarity_breakdown(std::string_view candidate, std::string_view reference,
                                               const EmbeddingProvider& provider, TokenizerMode mode) {
    const auto cand_tokens = tokenize(candidate, mode);
    const auto ref_tokens = tokenize(reference, mode);
    if (cand_tokens.empty()) throw ValidationError("candidate", "no tokens after tokenization");
    if (ref_tokens.empty()) throw ValidationError("reference", "no tokens after tokenization");
    const auto cand = provider.embed(cand_tokens);
    const auto ref = provider.embed(ref_tokens);
    std::size_t dim = 0;
    check_embeddings(cand, cand_tokens.size(), "candidate", dim);
    check_embeddings(ref, ref_tokens.size(), "reference", dim);
    return greedy_match(cand, ref);
}

double embed_similarity(std::string_view candidate, std::string_view reference,
                        const EmbeddingProvider& provider, TokenizerMode mode) {
    return embed_similarity_breakdown(candidate, reference, provider, mode).f1;
}

}  // namespace mifc
