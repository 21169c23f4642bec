#include "mifc/http_embedding.hpp"

#include <cmath>

#include "mifc/error.hpp"

namespace mifc {

using json = nlohmann::json;

HttpEmbeddingProvider::HttpEmbeddingProvider(ProviderConfig cfg, std::shared_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    cfg_.validate();
    if (!transport_) throw ConfigError("embedding provider needs a transport");
    api_key_ = resolve_api_key(cfg_);
}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed(std::span<const std::string> tokens) const {
    json body;
    body["model"] = cfg_.model_name;
    body["input"] = json::array();
    for (const auto& t : tokens) body["input"].push_back(t);
    const HttpHeaders headers = {{"Authorization", "Bearer " + api_key_}};

    HttpResponse response;
    for (int attempt = 1;; ++attempt) {
        try {
            response = transport_->post(cfg_.base_url + "/embeddings", body.dump(), headers, cfg_.timeout);
        } catch (const TransportError& e) {
            if (attempt > cfg_.max_retries) throw;
            continue;
        }
        if (response.status >= 200 && response.status < 300) break;
        if (!is_retryable_status(response.status) || attempt > cfg_.max_retries) {
            throw TransportError("embedding endpoint returned HTTP " + std::to_string(response.status),
                                 response.status);
        }
    }

    const json j = json::parse(response.body, nullptr, false);
    if (j.is_discarded()) throw TransportError("embedding endpoint returned non-JSON", response.status);
    std::vector<std::vector<double>> out(tokens.size());
    try {
        const auto& data = j.at("data");
        if (data.size() != tokens.size()) {
            throw TransportError("embedding endpoint returned " + std::to_string(data.size()) +
                                     " vectors for " + std::to_string(tokens.size()) + " tokens",
                                 response.status);
        }
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::size_t index = data[i].value("index", i);
            if (index >= out.size()) throw TransportError("embedding index out of range", response.status);
            auto v = data[i].at("embedding").get<std::vector<double>>();
            double norm2 = 0.0;
            for (double x : v) norm2 += x * x;
            if (v.empty() || norm2 == 0.0) throw TransportError("zero embedding vector", response.status);
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& x : v) x *= inv;
            out[index] = std::move(v);
        }
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected embedding response shape: ") + e.what(), response.status);
    }
    return out;
}

}  // namespace mifc
