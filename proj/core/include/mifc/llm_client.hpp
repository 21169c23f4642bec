#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "mifc/http.hpp"
#include "mifc/prompts.hpp"

namespace mifc {

struct ProviderConfig {
    std::string base_url;
    std::string model_name;
    std::string api_key_env = "MIFC_API_KEY";
    std::chrono::milliseconds timeout{60'000};
    int max_retries = 3;
    int max_in_flight = 4;
    double temperature = 0.0;

    void validate() const;
};

struct ChatRequest {
    PromptId prompt = PromptId::kCondense;
    std::string system;
    std::string user;
    double temperature = 0.0;
    /// 0 for the first ask, incremented when the pipeline re-prompts after a
    /// format violation. Not sent on the wire; it only distinguishes replay keys.
    int variant = 0;

    bool operator==(const ChatRequest&) const = default;
};

/// Renders a built-in template and splits it into chat roles.
ChatRequest make_request(PromptId id, const PromptBindings& bindings, double temperature, int variant = 0);

struct ChatUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    bool operator==(const ChatUsage&) const = default;
};

struct ChatExchange {
    ChatRequest request;
    std::string model;
    std::string response;
    std::optional<ChatUsage> usage;
    std::chrono::milliseconds latency{0};
    int attempt = 1;

    bool operator==(const ChatExchange&) const = default;
};

nlohmann::json exchange_to_json(const ChatExchange& ex);
ChatExchange exchange_from_json(const nlohmann::json& j);

/// Anything that answers chat requests: the HTTP client, the replay store,
/// test doubles. Implementations must be safe for concurrent calls.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual ChatExchange complete(const ChatRequest& request) = 0;
    virtual const std::string& model() const = 0;
};

/// Wire body: {"model", "messages": [{"role","content"}...], "temperature"}.
/// The API key never appears here; it travels in the Authorization header.
std::string build_chat_body(const std::string& model, const ChatRequest& request);

struct ParsedChatResponse {
    std::string content;
    std::optional<ChatUsage> usage;
};

/// Reads choices[0].message.content and usage. Throws TransportError on a body
/// that does not have that shape.
ParsedChatResponse parse_chat_response(std::string_view body);

/// True for statuses worth retrying: connection failures (0), 408, 429, 5xx.
bool is_retryable_status(int status);

/// Counting admission gate. Holders of a Ticket count toward the limit.
class AdmissionLimit {
public:
    explicit AdmissionLimit(int max_in_flight);

    class Ticket {
    public:
        explicit Ticket(AdmissionLimit& limit);
        ~Ticket();
        Ticket(const Ticket&) = delete;
        Ticket& operator=(const Ticket&) = delete;

    private:
        AdmissionLimit& limit_;
    };

    int in_flight() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int max_;
    int in_flight_ = 0;
};

struct RetryPolicy {
    std::chrono::milliseconds base_delay{1000};
    double multiplier = 2.0;
    /// Extra random fraction of the delay, drawn from [0, jitter).
    double jitter = 0.25;
    std::uint64_t seed = 0;
    /// Replaced in tests so retries do not actually wait.
    std::function<void(std::chrono::milliseconds)> sleep;
};

/// Chat-completion client for `{base_url}/chat/completions`.
///
/// Transient failures (timeouts, 429, 5xx) are retried up to max_retries times
/// with exponential backoff; the request body is re-sent verbatim. Other 4xx
/// fail immediately. At most max_in_flight requests are outstanding across all
/// threads sharing this client.
class ChatClient final : public ChatProvider {
public:
    ChatClient(ProviderConfig cfg, std::shared_ptr<HttpTransport> transport, RetryPolicy retry = {});

    ChatExchange complete(const ChatRequest& request) override;
    const std::string& model() const override { return cfg_.model_name; }
    const ProviderConfig& config() const { return cfg_; }

private:
    std::chrono::milliseconds backoff_delay(int attempt);

    ProviderConfig cfg_;
    std::shared_ptr<HttpTransport> transport_;
    RetryPolicy retry_;
    AdmissionLimit admission_;
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
    std::string api_key_;
};

/// Resolves the key named by cfg.api_key_env. Throws ConfigError when unset.
std::string resolve_api_key(const ProviderConfig& cfg);

/// One-shot convenience over ChatClient with the default transport.
ChatExchange complete(const ProviderConfig& cfg, const ChatRequest& request);

}  // namespace mifc
