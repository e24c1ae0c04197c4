#include "biq/bias_lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "biq/data.hpp"
#include "biq/error.hpp"
#include "biq/io.hpp"
#include "biq/text.hpp"
#include "numeric.hpp"

namespace biq {
namespace {

std::string NormalizeTerm(std::string_view term) {
  return text::Join(text::Words(term), 0, std::string::npos);
}

struct TermPattern {
  std::vector<std::string> words;
  std::size_t group = 0;
  std::string term;
};

// Sum of a sorted copy, so the result does not depend on input order.
double OrderFreeMean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

DisparityStats Summarize(std::span<const GroupMention> mentions,
                         const std::vector<std::pair<std::string, std::string>>& groups) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> polarities;
  for (const GroupMention& m : mentions) {
    polarities[{m.dimension, m.group}].push_back(m.context_polarity);
  }

  DisparityStats stats;
  std::vector<std::string> dimension_order;
  for (const auto& [dimension, group] : groups) {
    GroupStats g{.dimension = dimension, .group = group};
    if (auto it = polarities.find({dimension, group}); it != polarities.end()) {
      const std::vector<double>& values = it->second;
      g.mention_count = values.size();
      for (double p : values) {
        if (p > 0.0) ++g.positive_count;
        if (p < 0.0) ++g.negative_count;
      }
      g.mean_context_polarity = OrderFreeMean(values);
      if (g.negative_count > 0) {
        g.positive_negative_ratio =
            static_cast<double>(g.positive_count) / static_cast<double>(g.negative_count);
      }
    }
    if (std::find(dimension_order.begin(), dimension_order.end(), dimension) ==
        dimension_order.end()) {
      dimension_order.push_back(dimension);
    }
    stats.groups.push_back(std::move(g));
  }

  for (const std::string& dimension : dimension_order) {
    DimensionStats d{.name = dimension};
    double lo = 0.0, hi = 0.0, share_lo = 0.0, share_hi = 0.0;
    for (const GroupStats& g : stats.groups) {
      if (g.dimension != dimension || !g.mean_context_polarity) continue;
      const double mean = *g.mean_context_polarity;
      const double share =
          static_cast<double>(g.positive_count) / static_cast<double>(g.mention_count);
      if (d.mentioned_groups == 0) {
        lo = hi = mean;
        share_lo = share_hi = share;
      } else {
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
        share_lo = std::min(share_lo, share);
        share_hi = std::max(share_hi, share);
      }
      ++d.mentioned_groups;
    }
    if (d.mentioned_groups >= 2) {
      d.polarity_spread = std::clamp(hi - lo, 0.0, 2.0);
      d.positive_share_spread = std::clamp(share_hi - share_lo, 0.0, 1.0);
    }
    stats.dimensions.push_back(std::move(d));
  }
  return stats;
}

}  // namespace

BiasLexicon::BiasLexicon(std::vector<BiasDimension> dimensions)
    : dimensions_(std::move(dimensions)) {
  if (dimensions_.empty()) {
    throw Error(ErrorKind::kLexicon, "bias lexicon has no dimensions");
  }
  std::set<std::string> names;
  for (BiasDimension& d : dimensions_) {
    if (!names.insert(d.name).second) {
      throw Error(ErrorKind::kLexicon, fmt::format("dimension '{}' declared twice", d.name));
    }
    if (d.groups.size() < 2) {
      throw Error(ErrorKind::kLexicon,
                  fmt::format("dimension '{}' needs at least two groups", d.name));
    }
    std::map<std::string, std::string> owner;
    for (GroupTermSet& g : d.groups) {
      if (g.terms.empty()) {
        throw Error(ErrorKind::kLexicon, fmt::format("group '{}' has no terms", g.group));
      }
      for (std::string& term : g.terms) {
        term = NormalizeTerm(term);
        if (term.empty()) {
          throw Error(ErrorKind::kLexicon, fmt::format("group '{}' has an empty term", g.group));
        }
        auto [it, inserted] = owner.emplace(term, g.group);
        if (!inserted) {
          if (it->second == g.group) {
            throw Error(ErrorKind::kLexicon,
                        fmt::format("duplicate term '{}' in group '{}'", term, g.group));
          }
          throw Error(ErrorKind::kLexicon,
                      fmt::format("term '{}' appears in groups '{}' and '{}' of dimension '{}'",
                                  term, it->second, g.group, d.name));
        }
      }
    }
  }
}

const BiasDimension* BiasLexicon::FindDimension(std::string_view name) const {
  for (const BiasDimension& d : dimensions_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

BiasLexicon BiasLexicon::Parse(std::string_view content, std::string_view origin) {
  std::vector<BiasDimension> dimensions;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (detail::Trim(line).empty() || line.front() == '#') continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw Error(ErrorKind::kParse,
                  fmt::format("{}:{}: expected dimension<TAB>group<TAB>term", origin, line_no));
    }
    const std::string dim(detail::Trim(line.substr(0, t1)));
    const std::string group(detail::Trim(line.substr(t1 + 1, t2 - t1 - 1)));
    const std::string term(detail::Trim(line.substr(t2 + 1)));
    if (dim.empty() || group.empty() || term.empty()) {
      throw Error(ErrorKind::kParse, fmt::format("{}:{}: empty field", origin, line_no));
    }

    auto d = std::find_if(dimensions.begin(), dimensions.end(),
                          [&](const BiasDimension& x) { return x.name == dim; });
    if (d == dimensions.end()) {
      dimensions.push_back(BiasDimension{dim, {}});
      d = std::prev(dimensions.end());
    }
    auto g = std::find_if(d->groups.begin(), d->groups.end(),
                          [&](const GroupTermSet& x) { return x.group == group; });
    if (g == d->groups.end()) {
      d->groups.push_back(GroupTermSet{group, {}});
      g = std::prev(d->groups.end());
    }
    g->terms.push_back(term);
  }
  if (dimensions.empty()) {
    throw Error(ErrorKind::kParse, fmt::format("{}: no dimensions", origin));
  }
  try {
    return BiasLexicon(std::move(dimensions));
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", origin, e.what()));
  }
}

BiasLexicon BiasLexicon::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

BiasLexicon BiasLexicon::Resolve(std::string_view path_or_id) {
  return Load(ResolveInput(BundleKind::kBiasLexicon, path_or_id));
}

std::vector<GroupMention> ExtractMentions(std::string_view source, const BiasLexicon& bias,
                                          const SentimentLexicon& sentiment,
                                          std::size_t window) {
  if (window < 1) {
    throw Error(ErrorKind::kInvalidInput, "context window must be at least one token");
  }
  const std::vector<text::Token> tokens = text::Tokenize(source);
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const text::Token& t : tokens) words.push_back(t.text);

  std::vector<GroupMention> mentions;
  for (const BiasDimension& dim : bias.dimensions()) {
    std::vector<TermPattern> patterns;
    for (std::size_t gi = 0; gi < dim.groups.size(); ++gi) {
      for (const std::string& term : dim.groups[gi].terms) {
        patterns.push_back(TermPattern{text::Words(term), gi, term});
      }
    }
    std::stable_sort(patterns.begin(), patterns.end(), [](const auto& a, const auto& b) {
      return a.words.size() > b.words.size();
    });

    std::size_t i = 0;
    while (i < words.size()) {
      const TermPattern* hit = nullptr;
      for (const TermPattern& p : patterns) {
        if (i + p.words.size() > words.size()) continue;
        if (std::equal(p.words.begin(), p.words.end(), words.begin() + static_cast<long>(i))) {
          hit = &p;
          break;
        }
      }
      if (hit == nullptr) {
        ++i;
        continue;
      }
      const std::size_t len = hit->words.size();
      GroupMention m;
      m.dimension = dim.name;
      m.group = dim.groups[hit->group].group;
      m.term = hit->term;
      m.begin = tokens[i].begin;
      m.end = tokens[i + len - 1].end;
      m.matched_text = std::string(source.substr(m.begin, m.end - m.begin));
      m.token_index = i;
      m.token_length = len;
      const std::size_t first = i >= window ? i - window : 0;
      const std::size_t last = std::min(words.size(), i + len + window);
      m.context_window = text::Join(words, first, last);
      m.context_polarity = ScoreSentiment(m.context_window, sentiment).polarity;
      mentions.push_back(std::move(m));
      i += len;
    }
  }

  std::stable_sort(mentions.begin(), mentions.end(),
                   [](const GroupMention& a, const GroupMention& b) { return a.begin < b.begin; });
  return mentions;
}

double DisparityStats::MaxPolaritySpread() const {
  double spread = 0.0;
  for (const DimensionStats& d : dimensions) spread = std::max(spread, d.polarity_spread);
  return spread;
}

DisparityStats GroupDisparity(std::span<const GroupMention> mentions, const BiasLexicon& lexicon) {
  std::vector<std::pair<std::string, std::string>> groups;
  for (const BiasDimension& d : lexicon.dimensions()) {
    for (const GroupTermSet& g : d.groups) groups.emplace_back(d.name, g.group);
  }
  return Summarize(mentions, groups);
}

DisparityStats GroupDisparity(std::span<const GroupMention> mentions) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const GroupMention& m : mentions) seen.emplace(m.dimension, m.group);
  return Summarize(mentions, {seen.begin(), seen.end()});
}

double MentionBalanceDisparity(const DisparityStats& stats) {
  double spread = 0.0;
  for (const DimensionStats& d : stats.dimensions) {
    spread = std::max(spread, d.positive_share_spread);
  }
  return spread;
}

double IntegrateBiasScore(double polarity_spread, double sentiment_disparity,
                          const IntegrationWeights& weights) {
  if (!(polarity_spread >= 0.0 && polarity_spread <= 2.0)) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("polarity spread {} outside [0, 2]", polarity_spread));
  }
  if (!(sentiment_disparity >= 0.0 && sentiment_disparity <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("sentiment disparity {} outside [0, 1]", sentiment_disparity));
  }
  if (!(weights.keyword >= 0.0) || !(weights.sentiment >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "integration weights must be non-negative");
  }
  const double b = weights.keyword * (polarity_spread / 2.0) + weights.sentiment * sentiment_disparity;
  return std::clamp(b, 0.0, 1.0);
}

double IntegrateBiasScore(const DisparityStats& stats, double sentiment_disparity,
                          const IntegrationWeights& weights) {
  return IntegrateBiasScore(stats.MaxPolaritySpread(), sentiment_disparity, weights);
}

}  // namespace biq
