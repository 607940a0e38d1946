#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace scribe {

// Whitespace-token count.
std::size_t count_words(std::string_view text);

// Splits after '.', '!' or '?' when followed by whitespace or end of text.
// Abbreviations are not special-cased. Empty and whitespace-only pieces are
// dropped and each piece is trimmed.
std::vector<std::string_view> split_sentences(std::string_view text);

std::size_t count_sentences(std::string_view text);

std::string_view trim(std::string_view text);

bool is_blank(std::string_view text);

}  // namespace scribe
