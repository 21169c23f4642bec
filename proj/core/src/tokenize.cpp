#include "mifc/tokenize.hpp"

#include "mifc/error.hpp"
#include "mifc/utf8.hpp"

namespace mifc {

std::string_view tokenizer_mode_name(TokenizerMode mode) {
    return mode == TokenizerMode::kWhitespace ? "whitespace" : "character";
}

TokenizerMode parse_tokenizer_mode(std::string_view name) {
    if (name == "whitespace") return TokenizerMode::kWhitespace;
    if (name == "character") return TokenizerMode::kCharacter;
    throw ConfigError("unknown tokenizer_mode '" + std::string(name) + "'");
}

TokenizerMode default_tokenizer_mode(Language lang) {
    return is_unsegmented_script(lang) ? TokenizerMode::kCharacter : TokenizerMode::kWhitespace;
}

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode) {
    const std::u32string cps = utf8::decode(text);
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    for (char32_t cp : cps) {
        if (utf8::is_space(cp) || cp < 0x20) {
            flush();
        } else if (mode == TokenizerMode::kCharacter || utf8::is_punct(cp)) {
            flush();
            utf8::append(current, cp);
            flush();
        } else {
            utf8::append(current, cp);
        }
    }
    flush();
    return tokens;
}

}  // namespace mifc
