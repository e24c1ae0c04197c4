#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace biq {

enum class Category { kGender, kRace, kSocialClass, kLgbtq, kFamily };

inline constexpr std::array<Category, 5> kAllCategories = {
    Category::kGender, Category::kRace, Category::kSocialClass, Category::kLgbtq,
    Category::kFamily};

std::string_view CategoryName(Category category);

/// Case-insensitive; "LGBTQ+" folds to kLgbtq.
std::optional<Category> ParseCategory(std::string_view label);

struct Prompt {
  int id = 0;
  std::string text;
  Category category = Category::kGender;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

struct PromptCorpus {
  std::string name;
  std::vector<Prompt> prompts;  // ascending id

  const Prompt* Find(int id) const;
  std::size_t CountCategory(Category category) const;
};

/// CSV with header `id,question,category`. Throws kCorpus naming the CSV
/// line for a duplicate id, unknown category, empty text or bad id.
PromptCorpus ParseCorpus(std::string_view content, std::string name);
/// A readable file path, or the bundled id "appendix2".
PromptCorpus LoadCorpus(std::string_view path_or_id);
std::string WriteCorpus(const PromptCorpus& corpus);

/// One row of a published two-model score table.
struct PublishedScoreRow {
  int prompt_id = 0;
  double latimer = 0.0;
  double gpt = 0.0;
  double printed_ratio = 0.0;
  double printed_biq = 0.0;
};

/// CSV `id,latimer,gpt35,ratio,biq`; every value positive.
std::vector<PublishedScoreRow> ParsePublishedScores(std::string_view content,
                                                    std::string_view origin = "<memory>");
std::vector<PublishedScoreRow> LoadPublishedScores(std::string_view path_or_id);

struct ScoreAuditViolation {
  int prompt_id = 0;
  double recomputed_ratio = 0.0;
  double recomputed_biq = 0.0;
  double ratio_error = 0.0;  // |printed_ratio - latimer / gpt|
  double biq_error = 0.0;    // |printed_biq - 1 / printed_ratio|
};

struct ScoreAudit {
  std::size_t rows_checked = 0;
  double tolerance = 0.0;
  double max_ratio_error = 0.0;
  double max_biq_error = 0.0;
  std::vector<ScoreAuditViolation> violations;
};

inline constexpr double kPublishedRoundingTolerance = 0.02;

/// Recomputes each row's ratio and inverse and lists rows off by more than
/// `tolerance` in either column.
ScoreAudit AuditPublishedScores(std::span<const PublishedScoreRow> rows,
                                double tolerance = kPublishedRoundingTolerance);

}  // namespace biq
