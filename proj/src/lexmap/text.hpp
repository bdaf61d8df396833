#pragma once

#include <string>
#include <string_view>

namespace lexmap {

// Unicode helpers backing the tokenizer. All functions expect and produce
// UTF-8; invalid byte sequences decode to U+FFFD.

std::string nfc(std::string_view utf8);
std::string lowercase(std::string_view utf8);

std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view cps);

bool is_letter(char32_t cp);       // general category L*
bool is_decimal_digit(char32_t cp);  // general category Nd
bool is_space(char32_t cp);

// Number of code points in a UTF-8 string.
std::size_t codepoint_count(std::string_view utf8);

// Non-empty and free of internal whitespace.
bool is_single_token(std::string_view utf8);

}  // namespace lexmap
