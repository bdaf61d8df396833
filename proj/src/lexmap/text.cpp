#include "lexmap/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "lexmap/common.hpp"

namespace lexmap {

namespace {

const icu::Normalizer2& nfc_instance() {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(ec);
  if (U_FAILURE(ec) || n == nullptr) {
    throw Error("ICU NFC normalizer unavailable");
  }
  return *n;
}

}  // namespace

std::string nfc(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode ec = U_ZERO_ERROR;
  icu::UnicodeString out = nfc_instance().normalize(s, ec);
  if (U_FAILURE(ec)) throw Error("Unicode normalization failed");
  std::string r;
  out.toUTF8String(r);
  return r;
}

std::string lowercase(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.toLower(icu::Locale::getRoot());
  std::string r;
  s.toUTF8String(r);
  return r;
}

std::u32string decode_utf8(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::u32string out;
  out.reserve(static_cast<std::size_t>(s.countChar32()));
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

std::string encode_utf8(std::u32string_view cps) {
  icu::UnicodeString s;
  for (char32_t c : cps) s.append(static_cast<UChar32>(c));
  std::string r;
  s.toUTF8String(r);
  return r;
}

bool is_letter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)) != 0; }

bool is_decimal_digit(char32_t cp) {
  return u_isdigit(static_cast<UChar32>(cp)) != 0;
}

bool is_space(char32_t cp) { return u_isspace(static_cast<UChar32>(cp)) != 0; }

bool is_single_token(std::string_view utf8) {
  if (utf8.empty()) return false;
  for (char32_t cp : decode_utf8(utf8)) {
    if (is_space(cp)) return false;
  }
  return true;
}

std::size_t codepoint_count(std::string_view utf8) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < utf8.size();) {
    unsigned char b = static_cast<unsigned char>(utf8[i]);
    if (b < 0x80) i += 1;
    else if ((b >> 5) == 0x6) i += 2;
    else if ((b >> 4) == 0xE) i += 3;
    else if ((b >> 3) == 0x1E) i += 4;
    else i += 1;  // invalid lead byte, count it as one
    ++n;
  }
  return n;
}

}  // namespace lexmap
