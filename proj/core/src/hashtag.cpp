#include "hashspread/hashtag.hpp"

namespace hashspread {

namespace {

bool is_ascii_tag_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '-' || c == '_';
}

// Second byte of the accepted two-byte UTF-8 sequences (lead byte 0xC3):
// a/o/u-umlaut lower 0xA4/0xB6/0xBC, upper 0x84/0x96/0x9C, Eszett 0x9F.
bool is_umlaut_tail(unsigned char c) {
    switch (c) {
        case 0xA4:
        case 0xB6:
        case 0xBC:
        case 0x84:
        case 0x96:
        case 0x9C:
        case 0x9F:
            return true;
        default:
            return false;
    }
}

}  // namespace

std::size_t hashtag_char_len(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    unsigned char c = static_cast<unsigned char>(text[pos]);
    if (is_ascii_tag_char(c)) return 1;
    if (c == 0xC3 && pos + 1 < text.size() &&
        is_umlaut_tail(static_cast<unsigned char>(text[pos + 1]))) {
        return 2;
    }
    return 0;
}

std::vector<HashtagToken> extract_hashtags(std::string_view text) {
    std::vector<HashtagToken> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '#') {
            ++i;
            continue;
        }
        std::size_t start = i + 1;
        std::size_t end = start;
        while (true) {
            std::size_t len = hashtag_char_len(text, end);
            if (len == 0) break;
            end += len;
        }
        if (end > start) {
            std::string raw(text.substr(start, end - start));
            std::string canonical = canonicalize(raw);
            tokens.push_back({std::move(raw), std::move(canonical)});
        }
        i = end > start ? end : i + 1;
    }
    return tokens;
}

std::string canonicalize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        unsigned char c = static_cast<unsigned char>(raw[i]);
        if (c >= 'A' && c <= 'Z') {
            out.push_back(static_cast<char>(c - 'A' + 'a'));
            ++i;
        } else if (c == 0xC3 && i + 1 < raw.size()) {
            unsigned char tail = static_cast<unsigned char>(raw[i + 1]);
            // uppercase umlauts are 0x20 below their lowercase forms
            if (tail == 0x84 || tail == 0x96 || tail == 0x9C) tail += 0x20;
            out.push_back(static_cast<char>(c));
            out.push_back(static_cast<char>(tail));
            i += 2;
        } else {
            out.push_back(static_cast<char>(c));
            ++i;
        }
    }
    return out;
}

}  // namespace hashspread
