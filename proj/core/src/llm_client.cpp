#include "mifc/llm_client.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "mifc/error.hpp"

namespace mifc {

using json = nlohmann::json;

void ProviderConfig::validate() const {
    if (model_name.empty()) throw ConfigError("provider.model_name must be set");
    if (max_in_flight < 1) throw ConfigError("provider.max_in_flight must be >= 1");
    if (max_retries < 0 || max_retries > 10) throw ConfigError("provider.max_retries must be in [0, 10]");
    if (!(temperature >= 0.0)) throw ConfigError("provider.temperature must be >= 0");
    if (timeout.count() <= 0) throw ConfigError("provider.timeout must be positive");
}

ChatRequest make_request(PromptId id, const PromptBindings& bindings, double temperature, int variant) {
    RenderedPrompt rendered = render_roles(builtin_template(id), bindings);
    return {id, std::move(rendered.system), std::move(rendered.user), temperature, variant};
}

json exchange_to_json(const ChatExchange& ex) {
    json j;
    j["prompt"] = prompt_id_name(ex.request.prompt);
    j["model"] = ex.model;
    j["system"] = ex.request.system;
    j["user"] = ex.request.user;
    j["temperature"] = ex.request.temperature;
    j["variant"] = ex.request.variant;
    j["response"] = ex.response;
    if (ex.usage) {
        j["usage"] = {{"prompt_tokens", ex.usage->prompt_tokens},
                      {"completion_tokens", ex.usage->completion_tokens}};
    }
    j["latency_ms"] = ex.latency.count();
    j["attempt"] = ex.attempt;
    return j;
}

ChatExchange exchange_from_json(const json& j) {
    try {
        ChatExchange ex;
        ex.request.prompt = parse_prompt_id(j.at("prompt").get<std::string>());
        ex.model = j.at("model").get<std::string>();
        ex.request.system = j.at("system").get<std::string>();
        ex.request.user = j.at("user").get<std::string>();
        ex.request.temperature = j.at("temperature").get<double>();
        ex.request.variant = j.value("variant", 0);
        ex.response = j.at("response").get<std::string>();
        if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
            ex.usage = ChatUsage{it->value("prompt_tokens", std::int64_t{0}),
                                 it->value("completion_tokens", std::int64_t{0})};
        }
        ex.latency = std::chrono::milliseconds(j.value("latency_ms", std::int64_t{0}));
        ex.attempt = j.value("attempt", 1);
        return ex;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed chat exchange record: ") + e.what());
    }
}

std::string build_chat_body(const std::string& model, const ChatRequest& request) {
    json messages = json::array();
    if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
    messages.push_back({{"role", "user"}, {"content", request.user}});
    json body;
    body["model"] = model;
    body["messages"] = std::move(messages);
    body["temperature"] = request.temperature;
    return body.dump();
}

ParsedChatResponse parse_chat_response(std::string_view body) {
    const json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw TransportError("provider returned a non-JSON body", 200);
    }
    try {
        ParsedChatResponse out;
        const auto& message = j.at("choices").at(0).at("message");
        const auto& content = message.at("content");
        out.content = content.is_null() ? std::string() : content.get<std::string>();
        if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
            out.usage = ChatUsage{it->value("prompt_tokens", std::int64_t{0}),
                                  it->value("completion_tokens", std::int64_t{0})};
        }
        return out;
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected provider response shape: ") + e.what(), 200);
    }
}

bool is_retryable_status(int status) {
    return status == 0 || status == 408 || status == 429 || (status >= 500 && status <= 599);
}

AdmissionLimit::AdmissionLimit(int max_in_flight) : max_(max_in_flight) {
    if (max_ < 1) throw ConfigError("max_in_flight must be >= 1");
}

AdmissionLimit::Ticket::Ticket(AdmissionLimit& limit) : limit_(limit) {
    std::unique_lock lock(limit_.mutex_);
    limit_.cv_.wait(lock, [&] { return limit_.in_flight_ < limit_.max_; });
    ++limit_.in_flight_;
}

AdmissionLimit::Ticket::~Ticket() {
    {
        std::lock_guard lock(limit_.mutex_);
        --limit_.in_flight_;
    }
    limit_.cv_.notify_one();
}

int AdmissionLimit::in_flight() const {
    std::lock_guard lock(mutex_);
    return in_flight_;
}

std::string resolve_api_key(const ProviderConfig& cfg) {
    const char* value = std::getenv(cfg.api_key_env.c_str());
    if (value == nullptr || *value == '\0') {
        throw ConfigError("environment variable " + cfg.api_key_env + " is not set");
    }
    return value;
}

ChatClient::ChatClient(ProviderConfig cfg, std::shared_ptr<HttpTransport> transport, RetryPolicy retry)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      retry_(std::move(retry)),
      admission_(cfg_.max_in_flight),
      rng_(retry_.seed) {
    cfg_.validate();
    if (!transport_) throw ConfigError("chat client needs a transport");
    if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    api_key_ = resolve_api_key(cfg_);
}

std::chrono::milliseconds ChatClient::backoff_delay(int attempt) {
    double fraction = 0.0;
    {
        std::lock_guard lock(rng_mutex_);
        fraction = std::uniform_real_distribution<double>(0.0, retry_.jitter)(rng_);
    }
    const double base = static_cast<double>(retry_.base_delay.count()) *
                        std::pow(retry_.multiplier, static_cast<double>(attempt - 1));
    return std::chrono::milliseconds(static_cast<std::int64_t>(base * (1.0 + fraction)));
}

ChatExchange ChatClient::complete(const ChatRequest& request) {
    const std::string url = cfg_.base_url + "/chat/completions";
    const std::string body = build_chat_body(cfg_.model_name, request);
    const HttpHeaders headers = {{"Authorization", "Bearer " + api_key_}};

    int last_status = 0;
    std::string last_message;
    const int max_attempts = cfg_.max_retries + 1;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const auto start = std::chrono::steady_clock::now();
        HttpResponse response;
        bool transport_failed = false;
        {
            AdmissionLimit::Ticket ticket(admission_);
            try {
                response = transport_->post(url, body, headers, cfg_.timeout);
            } catch (const TransportError& e) {
                transport_failed = true;
                last_status = e.status();
                last_message = e.what();
            }
        }
        if (!transport_failed) {
            last_status = response.status;
            if (response.status >= 200 && response.status < 300) {
                ParsedChatResponse parsed = parse_chat_response(response.body);
                ChatExchange ex;
                ex.request = request;
                ex.model = cfg_.model_name;
                ex.response = std::move(parsed.content);
                ex.usage = parsed.usage;
                ex.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start);
                ex.attempt = attempt;
                return ex;
            }
            last_message = "provider returned HTTP " + std::to_string(response.status);
            if (!is_retryable_status(response.status)) {
                throw TransportError(last_message, response.status);
            }
        } else if (!is_retryable_status(last_status)) {
            throw TransportError(last_message, last_status);
        }
        if (attempt < max_attempts) retry_.sleep(backoff_delay(attempt));
    }
    throw TransportError("retries exhausted after " + std::to_string(max_attempts) +
                             " attempts: " + last_message,
                         last_status);
}

ChatExchange complete(const ProviderConfig& cfg, const ChatRequest& request) {
    ChatClient client(cfg, make_default_transport());
    return client.complete(request);
}

}  // namespace mifc
