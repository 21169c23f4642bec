#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mifc/language.hpp"

namespace mifc {

enum class TokenizerMode {
    kWhitespace,  // split on spaces, every punctuation mark is its own token
    kCharacter,   // every non-space scalar value is a token
};

std::string_view tokenizer_mode_name(TokenizerMode mode);
TokenizerMode parse_tokenizer_mode(std::string_view name);

/// Whitespace for EN/FR/ES; characters for ZH/JA; characters (one Hangul
/// syllable block per token) for KO.
TokenizerMode default_tokenizer_mode(Language lang);

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

}  // namespace mifc
