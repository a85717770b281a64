#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge {

std::string to_lower(std::string_view s);

// Splits on ASCII whitespace; empty tokens are dropped.
std::vector<std::string> split_ws(std::string_view s);

// Trims and collapses internal ASCII whitespace runs to single spaces.
std::string collapse_ws(std::string_view s);

// Keeps the first `max_tokens` whitespace tokens, joined by single spaces.
std::string truncate_tokens(std::string_view s, int max_tokens);

// Replaces invalid UTF-8 byte sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

} // namespace forge
