#pragma once

#include <string>
#include <string_view>

namespace simjudge::unicode {

// Decodes UTF-8 into Unicode scalar values. Malformed sequences decode to
// U+FFFD one byte at a time.
std::u32string decode(std::string_view utf8);

std::string encode(std::u32string_view text);

// Simple (one-to-one) case folding for ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Code points outside those blocks are returned unchanged.
char32_t fold(char32_t c);

std::u32string fold(std::u32string_view text);

// ASCII whitespace plus U+00A0 and U+3000.
bool is_space(char32_t c);

}  // namespace simjudge::unicode
