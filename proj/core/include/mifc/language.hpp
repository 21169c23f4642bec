#pragma once

#include <array>
#include <string>
#include <string_view>

namespace mifc {

/// The six corpus languages. Nothing else is representable.
enum class Language { kEN, kZH, kJA, kKO, kFR, kES };

inline constexpr std::array<Language, 6> kAllLanguages = {
    Language::kEN, Language::kZH, Language::kJA, Language::kKO, Language::kFR, Language::kES};

/// Parses an upper-case code ("EN", "KO", ...). Throws ValidationError on anything else.
Language parse_language(std::string_view code, std::string_view field = "lang");

std::string_view language_code(Language lang);

/// English name used to fill the LANG slot in prompts ("French").
std::string_view language_name(Language lang);

/// True for scripts written without spaces between words.
constexpr bool is_unsegmented_script(Language lang) {
    return lang == Language::kZH || lang == Language::kJA || lang == Language::kKO;
}

}  // namespace mifc
