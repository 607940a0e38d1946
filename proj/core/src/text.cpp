#include "scribe/text.hpp"

#include <cctype>

namespace scribe {
namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_terminator(char c) {
    return c == '.' || c == '!' || c == '?';
}

}  // namespace

std::string_view trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    return text.substr(begin, end - begin);
}

bool is_blank(std::string_view text) {
    return trim(text).empty();
}

std::size_t count_words(std::string_view text) {
    std::size_t words = 0;
    bool in_word = false;
    for (char c : text) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++words;
        }
    }
    return words;
}

std::vector<std::string_view> split_sentences(std::string_view text) {
    std::vector<std::string_view> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!is_terminator(text[i])) continue;
        const bool boundary = i + 1 == text.size() || is_space(text[i + 1]);
        if (!boundary) continue;
        auto piece = trim(text.substr(start, i + 1 - start));
        if (!piece.empty()) sentences.push_back(piece);
        start = i + 1;
    }
    auto tail = trim(text.substr(start));
    if (!tail.empty()) sentences.push_back(tail);
    return sentences;
}

std::size_t count_sentences(std::string_view text) {
    return split_sentences(text).size();
}

}  // namespace scribe
