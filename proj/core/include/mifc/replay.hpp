#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "mifc/llm_client.hpp"

namespace mifc {

/// Content key of a request as seen by a given model: SHA-256 over the model
/// name, both role texts, temperature and re-prompt variant.
std::string replay_key(const std::string& model, const ChatRequest& request);

/// In-memory exchange table backed by a JSONL file (one ChatExchange per
/// line). Saving sorts by key so recorded files are byte-stable.
class ReplayStore {
public:
    ReplayStore() = default;
    static std::shared_ptr<ReplayStore> load(const std::filesystem::path& path);

    std::optional<ChatExchange> find(const std::string& key) const;
    void put(const ChatExchange& exchange);
    std::size_t size() const;

    std::string serialize() const;
    void save(const std::filesystem::path& path) const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, ChatExchange> entries_;
};

/// Answers from a ReplayStore only. A miss is a TransportError so callers
/// treat it like an unreachable provider.
class ReplayProvider final : public ChatProvider {
public:
    ReplayProvider(std::shared_ptr<const ReplayStore> store, std::string model);
    ChatExchange complete(const ChatRequest& request) override;
    const std::string& model() const override { return model_; }

private:
    std::shared_ptr<const ReplayStore> store_;
    std::string model_;
};

/// Forwards to a live provider and records every successful exchange.
class RecordingProvider final : public ChatProvider {
public:
    RecordingProvider(std::shared_ptr<ChatProvider> inner, std::shared_ptr<ReplayStore> store);
    ChatExchange complete(const ChatRequest& request) override;
    const std::string& model() const override { return inner_->model(); }

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<ReplayStore> store_;
};

}  // namespace mifc
