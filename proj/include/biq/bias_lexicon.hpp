#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biq/sentiment.hpp"

namespace biq {

struct GroupTermSet {
  std::string group;
  std::vector<std::string> terms;  // normalized: lowercase, single-spaced tokens
};

struct BiasDimension {
  std::string name;
  std::vector<GroupTermSet> groups;
};

/// Group-identifying keywords per bias dimension. Every dimension has at
/// least two groups and no term belongs to two groups of one dimension.
class BiasLexicon {
 public:
  explicit BiasLexicon(std::vector<BiasDimension> dimensions);

  const std::vector<BiasDimension>& dimensions() const { return dimensions_; }
  const BiasDimension* FindDimension(std::string_view name) const;

  /// Lines of `dimension<TAB>group<TAB>term`; '#' comments.
  static BiasLexicon Parse(std::string_view content, std::string_view origin = "<memory>");
  static BiasLexicon Load(const std::filesystem::path& path);
  /// A readable file path, or the bundled id "default".
  static BiasLexicon Resolve(std::string_view path_or_id);

 private:
  std::vector<BiasDimension> dimensions_;
};

struct GroupMention {
  std::string dimension;
  std::string group;
  std::string term;          // lexicon form
  std::string matched_text;  // verbatim source bytes
  std::size_t begin = 0;     // byte offsets into the source
  std::size_t end = 0;
  std::size_t token_index = 0;
  std::size_t token_length = 0;
  std::string context_window;
  double context_polarity = 0.0;
};

inline constexpr std::size_t kDefaultContextWindow = 7;

/// Leftmost-longest, non-overlapping term matches per dimension, ordered by
/// source position. The context window spans `window` tokens either side of
/// the term and its polarity comes from ScoreSentiment.
std::vector<GroupMention> ExtractMentions(std::string_view text, const BiasLexicon& bias,
                                          const SentimentLexicon& sentiment,
                                          std::size_t window = kDefaultContextWindow);

struct GroupStats {
  std::string dimension;
  std::string group;
  std::size_t mention_count = 0;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
  std::optional<double> mean_context_polarity;    // nullopt when never mentioned
  std::optional<double> positive_negative_ratio;  // nullopt when no negative mention
};

struct DimensionStats {
  std::string name;
  double polarity_spread = 0.0;         // max - min of mentioned groups' mean polarity
  double positive_share_spread = 0.0;   // max - min of positive_count / mention_count
  std::size_t mentioned_groups = 0;
};

struct DisparityStats {
  std::vector<GroupStats> groups;
  std::vector<DimensionStats> dimensions;

  double MaxPolaritySpread() const;
};

/// Per-group aggregates for every group in `lexicon`, including unmentioned ones.
DisparityStats GroupDisparity(std::span<const GroupMention> mentions, const BiasLexicon& lexicon);

/// Groups that appear in `mentions` only, ordered by (dimension, group).
DisparityStats GroupDisparity(std::span<const GroupMention> mentions);

/// Largest spread of positive-mention share across groups of one dimension, in [0, 1].
double MentionBalanceDisparity(const DisparityStats& stats);

struct IntegrationWeights {
  double keyword = 0.5;
  double sentiment = 0.5;
};

/// b = clamp01(keyword * spread / 2 + sentiment * sentiment_disparity).
double IntegrateBiasScore(double polarity_spread, double sentiment_disparity,
                          const IntegrationWeights& weights = {});

/// Uses the largest per-dimension polarity spread.
double IntegrateBiasScore(const DisparityStats& stats, double sentiment_disparity,
                          const IntegrationWeights& weights = {});

}  // namespace biq
