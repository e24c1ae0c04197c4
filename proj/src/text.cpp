#include "biq/text.hpp"

#include <optional>

namespace biq::text {
namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
  bool valid = false;
};

CodePoint Decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0, 1, false};
  }
  if (i + len > s.size()) return {0, 1, false};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len, true};
}

void Encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsApostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }

bool IsWordChar(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
           (cp >= U'0' && cp <= U'9');
  }
  if (cp <= 0xBF) return false;                    // Latin-1 controls and symbols
  if (cp == 0xD7 || cp == 0xF7) return false;      // multiplication, division signs
  if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation, spaces
  if (cp >= 0x2190 && cp <= 0x2BFF) return false;  // arrows, math, boxes, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp == 0xFEFF) return false;
  return true;
}

char32_t Lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::optional<Token> current;
  std::size_t i = 0;
  while (i < s.size()) {
    const CodePoint cp = Decode(s, i);
    const bool word = cp.valid && IsWordChar(cp.value);
    bool keep_apostrophe = false;
    if (cp.valid && IsApostrophe(cp.value) && current && i + cp.length < s.size()) {
      const CodePoint next = Decode(s, i + cp.length);
      keep_apostrophe = next.valid && IsWordChar(next.value);
    }
    if (word || keep_apostrophe) {
      if (!current) current = Token{{}, i, i};
      Encode(keep_apostrophe ? U'\'' : Lower(cp.value), current->text);
      current->end = i + cp.length;
    } else if (current) {
      tokens.push_back(std::move(*current));
      current.reset();
    }
    i += cp.length;
  }
  if (current) tokens.push_back(std::move(*current));

  for (Token& t : tokens) {
    if (t.text.size() > 2 && t.text.ends_with("'s")) t.text.resize(t.text.size() - 2);
  }
  return tokens;
}

std::vector<std::string> Words(std::string_view utf8) {
  std::vector<std::string> words;
  for (Token& t : Tokenize(utf8)) words.push_back(std::move(t.text));
  return words;
}

std::string Lowercase(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const CodePoint cp = Decode(s, i);
    if (cp.valid) {
      Encode(Lower(cp.value), out);
    } else {
      out.push_back(s[i]);
    }
    i += cp.length;
  }
  return out;
}

std::string Join(const std::vector<std::string>& words, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t i = first; i < last && i < words.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += words[i];
  }
  return out;
}

}  // namespace biq::text
