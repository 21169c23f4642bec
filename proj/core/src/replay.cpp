#include "mifc/replay.hpp"

#include <sstream>

#include "mifc/digest.hpp"
#include "mifc/error.hpp"
#include "mifc/jsonl_io.hpp"

namespace mifc {

using json = nlohmann::json;

std::string replay_key(const std::string& model, const ChatRequest& request) {
    json j;
    j["model"] = model;
    j["system"] = request.system;
    j["user"] = request.user;
    j["temperature"] = request.temperature;
    j["variant"] = request.variant;
    return sha256_hex(j.dump());
}

std::shared_ptr<ReplayStore> ReplayStore::load(const std::filesystem::path& path) {
    auto store = std::make_shared<ReplayStore>();
    if (!std::filesystem::exists(path)) return store;
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw FormatError(path.string() + ": malformed replay record", line_no);
        store->put(exchange_from_json(j));
    }
    return store;
}

std::optional<ChatExchange> ReplayStore::find(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ReplayStore::put(const ChatExchange& exchange) {
    std::lock_guard lock(mutex_);
    entries_.insert_or_assign(replay_key(exchange.model, exchange.request), exchange);
}

std::size_t ReplayStore::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::string ReplayStore::serialize() const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& [key, ex] : entries_) {
        json j = exchange_to_json(ex);
        j["key"] = key;
        out += j.dump(-1, ' ', false, json::error_handler_t::strict);
        out += '\n';
    }
    return out;
}

void ReplayStore::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

ReplayProvider::ReplayProvider(std::shared_ptr<const ReplayStore> store, std::string model)
    : store_(std::move(store)), model_(std::move(model)) {
    if (!store_) throw ConfigError("replay provider needs a store");
}

ChatExchange ReplayProvider::complete(const ChatRequest& request) {
    const std::string key = replay_key(model_, request);
    auto found = store_->find(key);
    if (!found) {
        throw TransportError("replay miss for " + std::string(prompt_id_name(request.prompt)) +
                             " request to " + model_ + " (key " + key.substr(0, 12) + ")");
    }
    return *found;
}

RecordingProvider::RecordingProvider(std::shared_ptr<ChatProvider> inner, std::shared_ptr<ReplayStore> store)
    : inner_(std::move(inner)), store_(std::move(store)) {
    if (!inner_ || !store_) throw ConfigError("recording provider needs an inner provider and a store");
}

ChatExchange RecordingProvider::complete(const ChatRequest& request) {
    ChatExchange ex = inner_->complete(request);
    store_->put(ex);
    return ex;
}

}  // namespace mifc
