#include "mifc/error.hpp"
#include "mifc/metrics.hpp"

namespace mifc {

void CctsConfig::validate() const {
    if (!(lambda1 >= 0.0)) throw ConfigError("ccts.lambda1 must be >= 0");
    if (!(lambda2 >= 0.0)) throw ConfigError("ccts.lambda2 must be >= 0");
    if (!(lambda1 + lambda2 > 0.0)) throw ConfigError("ccts.lambda1 + ccts.lambda2 must be > 0");
    if (!(accept_threshold >= 0.0)) throw ConfigError("ccts.accept_threshold must be >= 0");
    if (!(accept_threshold < lambda1 + lambda2)) {
        throw ConfigError("ccts.accept_threshold must be below lambda1 + lambda2, or nothing can pass");
    }
}

CctsBreakdown ccts_breakdown(std::string_view source, std::string_view back_translation,
                             const CctsConfig& cfg, const EmbeddingProvider& provider,
                             TokenizerMode mode) {
    cfg.validate();
    CctsBreakdown out;
    out.bleu = bleu(back_translation, source, mode);
    out.embed = embed_similarity(back_translation, source, provider, mode);
    out.score = cfg.lambda1 * out.bleu.mean + cfg.lambda2 * out.embed;
    return out;
}

double ccts(std::string_view source, std::string_view back_translation, const CctsConfig& cfg,
            const EmbeddingProvider& provider) {
    return ccts_breakdown(source, back_translation, cfg, provider,
                          cfg.tokenizer_mode.value_or(TokenizerMode::kWhitespace))
        .score;
}

}  // namespace mifc
