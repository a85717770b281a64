#include "forge/text.hpp"

#include <cctype>

namespace forge {
namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

} // namespace

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ws(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_ws(s[i])) ++i;
        if (i > start) tokens.emplace_back(s.substr(start, i - start));
    }
    return tokens;
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_ws(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::string truncate_tokens(std::string_view s, int max_tokens) {
    if (max_tokens <= 0) return {};
    std::string out;
    int count = 0;
    std::size_t i = 0;
    while (i < s.size() && count < max_tokens) {
        while (i < s.size() && is_ws(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_ws(s[i])) ++i;
        if (i > start) {
            if (!out.empty()) out.push_back(' ');
            out.append(s.substr(start, i - start));
            ++count;
        }
    }
    return out;
}

std::string sanitize_utf8(std::string_view bytes) {
    static const char kReplacement[] = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        unsigned char b0 = static_cast<unsigned char>(bytes[i]);
        std::size_t len;
        unsigned int min_cp;
        if (b0 < 0x80) {
            out.push_back(bytes[i]);
            ++i;
            continue;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            min_cp = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            min_cp = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            min_cp = 0x10000;
        } else {
            out.append(kReplacement);
            ++i;
            continue;
        }
        if (i + len > n) {
            out.append(kReplacement);
            ++i;
            continue;
        }
        unsigned int cp = b0 & (0xFF >> (len + 1));
        bool valid = true;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char bk = static_cast<unsigned char>(bytes[i + k]);
            if ((bk & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (valid && (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
            valid = false;
        }
        if (valid) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out.append(kReplacement);
            ++i;
        }
    }
    return out;
}

} // namespace forge
