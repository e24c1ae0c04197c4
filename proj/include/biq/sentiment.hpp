#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace biq {

struct SentimentScore {
  double polarity = 0.0;      // [-1, 1]
  double subjectivity = 0.0;  // [0, 1]
  std::size_t token_count = 0;
  std::size_t matched_count = 0;

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

struct LexiconEntry {
  double polarity = 0.0;
  double subjectivity = 0.0;
};

/// Word-level polarity lexicon with negators and intensifiers.
/// Immutable once built; all mutators validate and throw kLexicon.
class SentimentLexicon {
 public:
  void AddEntry(std::string token, double polarity, double subjectivity);
  void AddNegator(std::string token);
  void AddIntensifier(std::string token, double multiplier);

  const LexiconEntry* FindEntry(std::string_view token) const;
  bool IsNegator(std::string_view token) const;
  std::optional<double> IntensifierMultiplier(std::string_view token) const;

  std::size_t entry_count() const { return entries_.size(); }
  std::size_t negator_count() const { return negators_.size(); }
  std::size_t intensifier_count() const { return intensifiers_.size(); }

  /// Returns a copy with every entry's polarity sign flipped.
  SentimentLexicon Mirrored() const;

  /// Tab-separated: token, polarity, subjectivity, kind (entry | negator |
  /// intensifier), optional multiplier. '#' lines and blank lines skipped.
  static SentimentLexicon Parse(std::string_view content, std::string_view origin = "<memory>");
  static SentimentLexicon Load(const std::filesystem::path& path);
  /// A readable file path, or the bundled id "default".
  static SentimentLexicon Resolve(std::string_view path_or_id);

 private:
  std::string Normalize(std::string token) const;

  std::unordered_map<std::string, LexiconEntry> entries_;
  std::unordered_set<std::string> negators_;
  std::unordered_map<std::string, double> intensifiers_;
};

struct SentimentOptions {
  double negation_factor = -0.5;
  /// Non-modifier tokens a negator reaches past before it expires.
  int negation_window = 1;
};

/// Mean polarity and subjectivity over lexicon-matched tokens. A negator
/// scales the next scored token's polarity by negation_factor; intensifiers
/// scale both values of the next scored token, then clamp.
SentimentScore ScoreSentiment(std::string_view text, const SentimentLexicon& lexicon,
                              const SentimentOptions& options = {});

/// Distance from neutral: |polarity|, in [0, 1].
double SentimentBias(const SentimentScore& score);

}  // namespace biq
