#include "biq/csv.hpp"

#include <fmt/format.h>

#include "biq/error.hpp"

namespace biq::csv {

std::vector<Record> Parse(std::string_view s) {
  std::vector<Record> records;
  Record current;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  bool record_open = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current = Record{};
    record_open = false;
  };

  while (i < s.size()) {
    if (!record_open) {
      current.line = line;
      record_open = true;
    }
    const char c = s[i];
    if (c == '"' && field.empty()) {
      const std::size_t quote_line = line;
      ++i;
      while (true) {
        if (i >= s.size()) {
          throw Error(ErrorKind::kParse,
                      fmt::format("line {}: unterminated quoted field", quote_line));
        }
        if (s[i] == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (s[i] == '\n') ++line;
        field.push_back(s[i++]);
      }
      if (i < s.size() && s[i] != ',' && s[i] != '\n' && s[i] != '\r') {
        throw Error(ErrorKind::kParse,
                    fmt::format("line {}: unexpected character after closing quote", line));
      }
      continue;
    }
    if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
      end_record();
      i += 2;
      ++line;
    } else if (c == '\n') {
      end_record();
      ++i;
      ++line;
    } else {
      field.push_back(c);
      ++i;
    }
  }
  if (record_open) end_record();
  return records;
}

std::string Escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string Row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += Escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace biq::csv
