#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace biq::text {

struct Token {
  std::string text;        // normalized: lowercased, curly apostrophes folded
  std::size_t begin = 0;   // byte offset into the source
  std::size_t end = 0;     // one past the last byte
};

/// Splits UTF-8 text into word tokens. Letters and digits (any non-ASCII
/// code point outside the punctuation and space blocks counts as a letter)
/// form words; apostrophes are kept only between two word characters and a
/// trailing possessive "'s" is dropped. Everything else separates tokens.
/// Invalid UTF-8 bytes are treated as separators.
std::vector<Token> Tokenize(std::string_view utf8);

/// Tokenize() and keep only the normalized strings.
std::vector<std::string> Words(std::string_view utf8);

/// ASCII and Latin-1 lowercase of a UTF-8 string.
std::string Lowercase(std::string_view utf8);

std::string Join(const std::vector<std::string>& words, std::size_t first, std::size_t last);

}  // namespace biq::text
