#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hashspread {

struct HashtagToken {
    std::string raw;        // as matched, without the leading '#'
    std::string canonical;  // case-folded identity

    bool operator==(const HashtagToken&) const = default;
};

// Extracts every maximal '#'-prefixed run of tag characters from UTF-8 text,
// in order of appearance, duplicates kept. The tag character class is ASCII
// letters and digits, the German umlauts a-umlaut/o-umlaut/u-umlaut in both
// cases, Eszett, '.', '-' and '_'. A '#' followed by no tag character yields
// nothing; any other byte (including other Unicode letters) terminates a tag.
std::vector<HashtagToken> extract_hashtags(std::string_view text);

// Lowercases ASCII letters and the three umlauts; Eszett and the punctuation
// class pass through. No other transformation.
std::string canonicalize(std::string_view raw);

// Length in bytes of the tag character at text[pos], or 0 if not a tag char.
std::size_t hashtag_char_len(std::string_view text, std::size_t pos);

}  // namespace hashspread
