#pragma once

#include <atomic>
#include <string>
#include <string_view>

#include "mifc/llm_client.hpp"

namespace mifc::testing {

/// Rule-based stand-in for the chat models. Answers every built-in prompt
/// deterministically from the prompt text alone:
///
///   condense   drops bracketed references and URLs
///   gen_qa     one MC question from the first sentence, one short answer from the rest
///   judge_qa   0.9 / 0.85 / 1.0, or 0.4 on logic when the pair mentions LOWQ
///   translate  tags text with the target code; back-translation strips the tag,
///              except that text containing DRIFT comes back as unrelated filler
///   expand     restates the keywords as a sentence
///
/// Inputs containing BADFMT get a malformed reply on the first ask only;
/// ALWAYSBAD gets malformed replies every time.
class FakeLlm final : public ChatProvider {
public:
    explicit FakeLlm(std::string model) : model_(std::move(model)) {}

    ChatExchange complete(const ChatRequest& request) override;
    const std::string& model() const override { return model_; }

    std::size_t calls() const { return calls_.load(); }

private:
    std::string model_;
    std::atomic<std::size_t> calls_{0};
};

/// Text after the last "###Input: " or "###Context: " marker of a user message.
std::string user_input(std::string_view user);

}  // namespace mifc::testing
