#pragma once

#include <memory>
#include <string>

#include "mifc/http.hpp"
#include "mifc/llm_client.hpp"
#include "mifc/metrics.hpp"

namespace mifc {

/// Embedding provider over `{base_url}/embeddings` with body
/// {"model", "input": [tokens...]}. Reads data[i].embedding (ordered by
/// data[i].index when present) and re-normalises every vector to unit length.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(ProviderConfig cfg, std::shared_ptr<HttpTransport> transport);

    std::vector<std::vector<double>> embed(std::span<const std::string> tokens) const override;
    std::string name() const override { return "http:" + cfg_.model_name; }

private:
    ProviderConfig cfg_;
    std::shared_ptr<HttpTransport> transport_;
    std::string api_key_;
};

}  // namespace mifc
