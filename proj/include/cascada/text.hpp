#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cascada::text {

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD.
std::u32string decode_utf8(std::string_view in);
std::string encode_utf8(std::u32string_view in);

/// Unicode simple lowercase mapping (via the C.UTF-8 ctype tables when
/// available, ASCII otherwise).
char32_t to_lower(char32_t c);
std::string to_lower(std::string_view utf8);

/// Splits on runs of ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& words, std::string_view sep);

}  // namespace cascada::text
