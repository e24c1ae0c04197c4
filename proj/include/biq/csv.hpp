#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace biq::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// RFC 4180 reader. Accepts LF or CRLF line endings and quoted fields with
/// embedded commas, quotes ("") and newlines. Throws kParse on an
/// unterminated quote or stray characters after a closing quote.
std::vector<Record> Parse(std::string_view content);

/// Quotes only when the field holds a comma, quote, CR or LF.
std::string Escape(std::string_view field);

/// Joins escaped fields with commas and appends '\n'.
std::string Row(const std::vector<std::string>& fields);

}  // namespace biq::csv
