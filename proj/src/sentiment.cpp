#include "biq/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "biq/data.hpp"
#include "biq/error.hpp"
#include "biq/io.hpp"
#include "biq/text.hpp"
#include "numeric.hpp"

namespace biq {
namespace {

// Chained intensifiers saturate long before this; it only keeps the product finite.
constexpr double kMaxMultiplier = 1e12;

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::string SentimentLexicon::Normalize(std::string token) const {
  const auto words = text::Words(token);
  if (words.size() != 1) {
    throw Error(ErrorKind::kLexicon,
                fmt::format("lexicon token '{}' is not a single word", token));
  }
  return words.front();
}

void SentimentLexicon::AddEntry(std::string token, double polarity, double subjectivity) {
  token = Normalize(std::move(token));
  if (!(polarity >= -1.0 && polarity <= 1.0)) {
    throw Error(ErrorKind::kLexicon,
                fmt::format("polarity {} of '{}' outside [-1, 1]", polarity, token));
  }
  if (!(subjectivity >= 0.0 && subjectivity <= 1.0)) {
    throw Error(ErrorKind::kLexicon,
                fmt::format("subjectivity {} of '{}' outside [0, 1]", subjectivity, token));
  }
  if (negators_.contains(token) || intensifiers_.contains(token)) {
    throw Error(ErrorKind::kLexicon,
                fmt::format("'{}' is already a negator or intensifier", token));
  }
  if (!entries_.emplace(token, LexiconEntry{polarity, subjectivity}).second) {
    throw Error(ErrorKind::kLexicon, fmt::format("duplicate entry '{}'", token));
  }
}

void SentimentLexicon::AddNegator(std::string token) {
  token = Normalize(std::move(token));
  if (entries_.contains(token) || intensifiers_.contains(token)) {
    throw Error(ErrorKind::kLexicon, fmt::format("negator '{}' is already scored", token));
  }
  if (!negators_.insert(token).second) {
    throw Error(ErrorKind::kLexicon, fmt::format("duplicate negator '{}'", token));
  }
}

void SentimentLexicon::AddIntensifier(std::string token, double multiplier) {
  token = Normalize(std::move(token));
  if (!(multiplier > 0.0 && multiplier <= 2.0)) {
    throw Error(ErrorKind::kLexicon,
                fmt::format("intensifier '{}' multiplier {} outside (0, 2]", token, multiplier));
  }
  if (entries_.contains(token) || negators_.contains(token)) {
    throw Error(ErrorKind::kLexicon, fmt::format("intensifier '{}' is already scored", token));
  }
  if (!intensifiers_.emplace(token, multiplier).second) {
    throw Error(ErrorKind::kLexicon, fmt::format("duplicate intensifier '{}'", token));
  }
}

const LexiconEntry* SentimentLexicon::FindEntry(std::string_view token) const {
  auto it = entries_.find(std::string(token));
  return it == entries_.end() ? nullptr : &it->second;
}

bool SentimentLexicon::IsNegator(std::string_view token) const {
  return negators_.contains(std::string(token));
}

std::optional<double> SentimentLexicon::IntensifierMultiplier(std::string_view token) const {
  auto it = intensifiers_.find(std::string(token));
  if (it == intensifiers_.end()) return std::nullopt;
  return it->second;
}

SentimentLexicon SentimentLexicon::Mirrored() const {
  SentimentLexicon copy = *this;
  for (auto& [token, entry] : copy.entries_) entry.polarity = -entry.polarity;
  return copy;
}

SentimentLexicon SentimentLexicon::Parse(std::string_view content, std::string_view origin) {
  SentimentLexicon lexicon;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (detail::Trim(line).empty() || line.front() == '#') continue;
    auto fail = [&](std::string_view why) {
      return Error(ErrorKind::kParse, fmt::format("{}:{}: {}", origin, line_no, why));
    };
    const auto fields = SplitTabs(line);
    if (fields.size() < 4 || fields.size() > 5) {
      throw fail("expected 4 or 5 tab-separated fields");
    }
    const std::string token(detail::Trim(fields[0]));
    const std::string_view kind = detail::Trim(fields[3]);
    try {
      if (kind == "entry") {
        auto polarity = detail::ParseDouble(fields[1]);
        auto subjectivity = detail::ParseDouble(fields[2]);
        if (!polarity || !subjectivity) throw fail("bad polarity or subjectivity");
        lexicon.AddEntry(token, *polarity, *subjectivity);
      } else if (kind == "negator") {
        lexicon.AddNegator(token);
      } else if (kind == "intensifier") {
        if (fields.size() != 5) throw fail("intensifier needs a multiplier");
        auto multiplier = detail::ParseDouble(fields[4]);
        if (!multiplier) throw fail("bad multiplier");
        lexicon.AddIntensifier(token, *multiplier);
      } else {
        throw fail(fmt::format("unknown kind '{}'", kind));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kParse) throw;
      throw Error(e.kind(), fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
  return lexicon;
}

SentimentLexicon SentimentLexicon::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

SentimentLexicon SentimentLexicon::Resolve(std::string_view path_or_id) {
  return Load(ResolveInput(BundleKind::kSentimentLexicon, path_or_id));
}

SentimentScore ScoreSentiment(std::string_view text, const SentimentLexicon& lexicon,
                              const SentimentOptions& options) {
  const std::vector<std::string> words = text::Words(text);
  SentimentScore score;
  score.token_count = words.size();

  double polarity_sum = 0.0;
  double subjectivity_sum = 0.0;
  int negation_left = 0;
  double multiplier = 1.0;

  for (const std::string& word : words) {
    if (lexicon.IsNegator(word)) {
      negation_left = options.negation_window;
      continue;
    }
    if (auto m = lexicon.IntensifierMultiplier(word)) {
      multiplier = std::min(multiplier * *m, kMaxMultiplier);
      continue;
    }
    const LexiconEntry* entry = lexicon.FindEntry(word);
    if (entry == nullptr) {
      if (negation_left > 0) --negation_left;
      multiplier = 1.0;
      continue;
    }
    double polarity = std::clamp(entry->polarity * multiplier, -1.0, 1.0);
    double subjectivity = std::clamp(entry->subjectivity * multiplier, 0.0, 1.0);
    if (negation_left > 0) polarity = std::clamp(polarity * options.negation_factor, -1.0, 1.0);
    polarity_sum += polarity;
    subjectivity_sum += subjectivity;
    ++score.matched_count;
    negation_left = 0;
    multiplier = 1.0;
  }

  if (score.matched_count > 0) {
    const auto n = static_cast<double>(score.matched_count);
    score.polarity = std::clamp(polarity_sum / n, -1.0, 1.0);
    score.subjectivity = std::clamp(subjectivity_sum / n, 0.0, 1.0);
  }
  return score;
}

double SentimentBias(const SentimentScore& score) {
  return std::min(1.0, std::abs(score.polarity));
}

}  // namespace biq
