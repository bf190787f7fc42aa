#ifndef MICA_UNICODE_HPP
#define MICA_UNICODE_HPP

// Minimal UTF-8 decoding and simple (one-to-one) case mapping.
//
// Case tables cover Basic Latin, Latin-1 Supplement, Latin Extended-A,
// basic Greek and basic Cyrillic. That is enough for French, the rest of
// Western Europe and most transliterated names; anything outside those
// blocks is treated as uncased.

#include <cstdint>
#include <string>
#include <string_view>

namespace mica::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes UTF-8; malformed sequences become U+FFFD one byte at a time.
inline std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* p = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char b0 = p[i];
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + extra >= n) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const unsigned char b = p[i + k];
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append_utf8(out, cp);
  return out;
}

namespace detail {

// Latin Extended-A alternates upper/lower in pairs, but the parity flips
// in U+0139..U+0148 and U+0179..U+017E.
constexpr bool extended_a_odd_is_upper(char32_t c) {
  return (c >= 0x0139 && c <= 0x0148) || (c >= 0x0179 && c <= 0x017E);
}

constexpr bool extended_a_paired(char32_t c) {
  return c >= 0x0100 && c <= 0x017E && c != 0x0130 && c != 0x0131 &&
         c != 0x0138 && c != 0x0149;
}

}  // namespace detail

constexpr bool is_upper(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  if (c >= 0x00C0 && c <= 0x00DE) return c != 0x00D7;
  if (c == 0x0130 || c == 0x0178) return true;
  if (detail::extended_a_paired(c)) {
    const bool odd = (c & 1) != 0;
    return detail::extended_a_odd_is_upper(c) ? odd : !odd;
  }
  if (c >= 0x0391 && c <= 0x03A9) return c != 0x03A2;
  if (c >= 0x0400 && c <= 0x042F) return true;
  return false;
}

constexpr bool is_lower(char32_t c) {
  if (c >= U'a' && c <= U'z') return true;
  if (c == 0x00B5) return true;
  if (c >= 0x00DF && c <= 0x00FF) return c != 0x00F7;
  if (c == 0x0131 || c == 0x0138 || c == 0x0149 || c == 0x017F) return true;
  if (detail::extended_a_paired(c)) return !is_upper(c);
  if (c >= 0x03AC && c <= 0x03CE) return true;
  if (c >= 0x0430 && c <= 0x045F) return true;
  return false;
}

constexpr bool is_cased(char32_t c) { return is_upper(c) || is_lower(c); }

constexpr bool is_decimal_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

constexpr bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' ||
         c == U'\f' || c == 0x00A0 || c == 0x2028 || c == 0x2029;
}

constexpr char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
  if (c == 0x0130) return U'i';
  if (c == 0x0178) return 0x00FF;
  if (detail::extended_a_paired(c) && is_upper(c)) return c + 1;
  if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 0x20;
  if (c >= 0x0410 && c <= 0x042F) return c + 0x20;
  if (c >= 0x0400 && c <= 0x040F) return c + 0x50;
  return c;
}

inline std::u32string fold(std::u32string_view text) {
  std::u32string out(text);
  for (auto& c : out) c = to_lower(c);
  return out;
}

inline std::string fold(std::string_view utf8) { return encode(fold(decode(utf8))); }

inline bool contains_space(std::string_view utf8) {
  for (char32_t c : decode(utf8))
    if (is_space(c)) return true;
  return false;
}

}  // namespace mica::unicode

#endif  // MICA_UNICODE_HPP
