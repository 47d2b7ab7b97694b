#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace engage::text {

// Decodes one UTF-8 code point starting at `pos`, advancing `pos`. Invalid
// sequences decode as the single lead byte so no input is ever dropped.
inline char32_t next_code_point(std::string_view s, std::size_t& pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    auto cont = [&](std::size_t i) -> int {
        if (pos + i >= s.size()) return -1;
        const auto b = static_cast<unsigned char>(s[pos + i]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0) {
        if (int c1 = cont(1); c1 >= 0) {
            pos += 2;
            return static_cast<char32_t>(((b0 & 0x1F) << 6) | c1);
        }
    } else if ((b0 & 0xF0) == 0xE0) {
        int c1 = cont(1), c2 = cont(2);
        if (c1 >= 0 && c2 >= 0) {
            pos += 3;
            return static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2);
        }
    } else if ((b0 & 0xF8) == 0xF0) {
        int c1 = cont(1), c2 = cont(2), c3 = cont(3);
        if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
            pos += 4;
            return static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3);
        }
    }
    ++pos;
    return b0;
}

// Same set Python's str.isspace() accepts.
constexpr bool is_space(char32_t c) noexcept {
    return (c >= 0x09 && c <= 0x0D) || (c >= 0x1C && c <= 0x20) || c == 0x85 || c == 0xA0 ||
           c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 ||
           c == 0x202F || c == 0x205F || c == 0x3000;
}

// Maximal runs of non-whitespace, byte-exact.
inline std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    std::size_t start = std::string_view::npos;
    while (pos < s.size()) {
        const std::size_t here = pos;
        const char32_t c = next_code_point(s, pos);
        if (is_space(c)) {
            if (start != std::string_view::npos) {
                out.emplace_back(s.substr(start, here - start));
                start = std::string_view::npos;
            }
        } else if (start == std::string_view::npos) {
            start = here;
        }
    }
    if (start != std::string_view::npos) out.emplace_back(s.substr(start));
    return out;
}

// Python's string.punctuation.
constexpr bool is_ascii_punct(char c) noexcept {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
           (c >= '{' && c <= '~');
}

// Typographic punctuation commonly pasted into chat responses.
constexpr bool is_unicode_punct(char32_t c) noexcept {
    switch (c) {
        case 0x00A1: case 0x00AB: case 0x00BB: case 0x00BF:
        case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014: case 0x2015:
        case 0x2018: case 0x2019: case 0x201A: case 0x201C: case 0x201D: case 0x201E:
        case 0x2022: case 0x2026: case 0x2039: case 0x203A:
            return true;
        default:
            return false;
    }
}

// Strips ASCII and typographic punctuation from both ends of a token.
inline std::string strip_edge_punct(std::string_view token) {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end) {
        if (is_ascii_punct(token[begin])) {
            ++begin;
            continue;
        }
        std::size_t p = begin;
        if (is_unicode_punct(next_code_point(token, p))) {
            begin = p;
            continue;
        }
        break;
    }
    while (end > begin) {
        if (is_ascii_punct(token[end - 1])) {
            --end;
            continue;
        }
        // Walk back to the lead byte of the last code point.
        std::size_t lead = end - 1;
        while (lead > begin && (static_cast<unsigned char>(token[lead]) & 0xC0) == 0x80) --lead;
        std::size_t p = lead;
        if (is_unicode_punct(next_code_point(token, p)) && p == end) {
            end = lead;
            continue;
        }
        break;
    }
    return std::string(token.substr(begin, end - begin));
}

// Words for LSDE counting: whitespace runs with edge punctuation removed.
// Tokens that are nothing but punctuation ("-", "...") are not words.
inline std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> words;
    for (const auto& raw : split_whitespace(s)) {
        auto w = strip_edge_punct(raw);
        if (!w.empty()) words.push_back(std::move(w));
    }
    return words;
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace engage::text
