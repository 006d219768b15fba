#pragma once

#include <string>
#include <string_view>

namespace cascada::base64 {

std::string encode(std::string_view bytes);
/// Standard alphabet with padding. Throws kInvalidArgument on bad input.
std::string decode(std::string_view text);

}  // namespace cascada::base64
