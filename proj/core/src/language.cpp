#include "mifc/language.hpp"

#include "mifc/error.hpp"

namespace mifc {

Language parse_language(std::string_view code, std::string_view field) {
    for (Language lang : kAllLanguages) {
        if (language_code(lang) == code) return lang;
    }
    throw ValidationError(std::string(field),
                          "unknown language code '" + std::string(code) +
                              "' (expected one of EN, ZH, JA, KO, FR, ES)");
}

std::string_view language_code(Language lang) {
    switch (lang) {
        case Language::kEN: return "EN";
        case Language::kZH: return "ZH";
        case Language::kJA: return "JA";
        case Language::kKO: return "KO";
        case Language::kFR: return "FR";
        case Language::kES: return "ES";
    }
    return "??";
}

std::string_view language_name(Language lang) {
    switch (lang) {
        case Language::kEN: return "English";
        case Language::kZH: return "Chinese";
        case Language::kJA: return "Japanese";
        case Language::kKO: return "Korean";
        case Language::kFR: return "French";
        case Language::kES: return "Spanish";
    }
    return "Unknown";
}

}  // namespace mifc
