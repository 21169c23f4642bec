#pragma once

#include <string>
#include <string_view>

namespace mifc::utf8 {

/// Decodes UTF-8 into Unicode scalar values. Throws FormatError on malformed
/// sequences, overlongs, surrogates and values past U+10FFFF.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

bool is_valid(std::string_view bytes);

/// Number of scalar values. Input must be valid UTF-8.
std::size_t length(std::string_view bytes);

/// Simple one-to-one lower-case mapping covering ASCII, Latin-1, Latin
/// Extended-A, Greek, Cyrillic and fullwidth Latin. Other code points map to
/// themselves, so the length in scalar values never changes.
char32_t to_lower(char32_t cp);
std::u32string to_lower(std::u32string_view text);

bool is_space(char32_t cp);

/// Punctuation and symbols that terminate a word: ASCII punctuation, Latin-1
/// and general punctuation blocks, CJK symbols, fullwidth punctuation.
bool is_punct(char32_t cp);

/// Letters, digits, marks and underscore; everything that is neither space nor
/// punctuation. CJK ideographs count as word characters.
bool is_word_char(char32_t cp);

/// Trims Unicode whitespace at both ends.
std::string_view trim(std::string_view text);

}  // namespace mifc::utf8
