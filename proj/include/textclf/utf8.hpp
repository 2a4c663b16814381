#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Minimal UTF-8 codec. Malformed sequences decode to U+FFFD.
namespace textclf::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

/// Number of codepoints in `text`.
std::size_t length(std::string_view text);

/// "U+064A" style rendering, at least four hex digits.
std::string format_codepoint(char32_t cp);

/// Parses "U+XXXX" (case-insensitive prefix). Throws DataError on bad input.
char32_t parse_codepoint(std::string_view text);

}  // namespace textclf::utf8
