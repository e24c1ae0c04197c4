#include "biq/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "biq/csv.hpp"
#include "biq/data.hpp"
#include "biq/error.hpp"
#include "biq/io.hpp"
#include "biq/metric.hpp"
#include "biq/text.hpp"
#include "numeric.hpp"

namespace biq {
namespace {

// Absorbs binary representation noise when comparing against a decimal bound.
constexpr double kComparisonSlack = 1e-9;

std::string_view SkipBom(std::string_view content) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);
  return content;
}

}  // namespace

std::string_view CategoryName(Category category) {
  switch (category) {
    case Category::kGender: return "Gender";
    case Category::kRace: return "Race";
    case Category::kSocialClass: return "Social Class";
    case Category::kLgbtq: return "LGBTQ";
    case Category::kFamily: return "Family";
  }
  return "Gender";
}

std::optional<Category> ParseCategory(std::string_view label) {
  std::string folded = text::Lowercase(detail::Trim(label));
  if (folded.ends_with('+')) folded.pop_back();
  for (Category c : kAllCategories) {
    if (folded == text::Lowercase(CategoryName(c))) return c;
  }
  return std::nullopt;
}

const Prompt* PromptCorpus::Find(int id) const {
  auto it = std::lower_bound(prompts.begin(), prompts.end(), id,
                             [](const Prompt& p, int v) { return p.id < v; });
  return it != prompts.end() && it->id == id ? &*it : nullptr;
}

std::size_t PromptCorpus::CountCategory(Category category) const {
  return static_cast<std::size_t>(std::count_if(
      prompts.begin(), prompts.end(), [&](const Prompt& p) { return p.category == category; }));
}

PromptCorpus ParseCorpus(std::string_view content, std::string name) {
  const auto records = csv::Parse(SkipBom(content));
  if (records.empty()) {
    throw Error(ErrorKind::kCorpus, fmt::format("{}: missing header", name));
  }
  const auto& header = records.front().fields;
  if (header.size() != 3 || detail::Trim(header[0]) != "id" ||
      detail::Trim(header[1]) != "question" || detail::Trim(header[2]) != "category") {
    throw Error(ErrorKind::kCorpus,
                fmt::format("{}: header must be id,question,category", name));
  }

  PromptCorpus corpus{std::move(name), {}};
  std::map<int, std::size_t> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;  // blank line
    auto fail = [&](const std::string& why) {
      return Error(ErrorKind::kCorpus, fmt::format("{}: row {}: {}", corpus.name, rec.line, why));
    };
    if (rec.fields.size() != 3) {
      throw fail(fmt::format("expected 3 fields, found {}", rec.fields.size()));
    }
    const auto id = detail::ParseInt<int>(rec.fields[0]);
    if (!id || *id <= 0) throw fail(fmt::format("bad id '{}'", rec.fields[0]));
    if (auto [it, inserted] = seen.emplace(*id, rec.line); !inserted) {
      throw fail(fmt::format("duplicate id {} (first on row {})", *id, it->second));
    }
    if (detail::Trim(rec.fields[1]).empty()) throw fail("empty question text");
    const auto category = ParseCategory(rec.fields[2]);
    if (!category) throw fail(fmt::format("unknown category '{}'", rec.fields[2]));
    corpus.prompts.push_back(Prompt{*id, rec.fields[1], *category});
  }
  std::stable_sort(corpus.prompts.begin(), corpus.prompts.end(),
                   [](const Prompt& a, const Prompt& b) { return a.id < b.id; });
  return corpus;
}

PromptCorpus LoadCorpus(std::string_view path_or_id) {
  const auto path = ResolveInput(BundleKind::kCorpus, path_or_id);
  const bool bundled = BundledPath(BundleKind::kCorpus, path_or_id) == path;
  return ParseCorpus(ReadFile(path), bundled ? std::string(path_or_id) : path.string());
}

std::string WriteCorpus(const PromptCorpus& corpus) {
  std::string out = csv::Row({"id", "question", "category"});
  for (const Prompt& p : corpus.prompts) {
    out += csv::Row({std::to_string(p.id), p.text, std::string(CategoryName(p.category))});
  }
  return out;
}

std::vector<PublishedScoreRow> ParsePublishedScores(std::string_view content,
                                                    std::string_view origin) {
  const auto records = csv::Parse(SkipBom(content));
  if (records.empty() || records.front().fields !=
                             std::vector<std::string>{"id", "latimer", "gpt35", "ratio", "biq"}) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: header must be id,latimer,gpt35,ratio,biq", origin));
  }
  std::vector<PublishedScoreRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    auto fail = [&](const std::string& why) {
      return Error(ErrorKind::kParse, fmt::format("{}: row {}: {}", origin, rec.line, why));
    };
    if (rec.fields.size() != 5) throw fail("expected 5 fields");
    const auto id = detail::ParseInt<int>(rec.fields[0]);
    if (!id || *id <= 0) throw fail(fmt::format("bad id '{}'", rec.fields[0]));
    PublishedScoreRow row{.prompt_id = *id};
    double* targets[] = {&row.latimer, &row.gpt, &row.printed_ratio, &row.printed_biq};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = detail::ParseDouble(rec.fields[k + 1]);
      if (!v || *v <= 0.0) throw fail(fmt::format("value '{}' is not positive", rec.fields[k + 1]));
      *targets[k] = *v;
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.prompt_id < b.prompt_id;
  });
  return rows;
}

std::vector<PublishedScoreRow> LoadPublishedScores(std::string_view path_or_id) {
  const auto path = ResolveInput(BundleKind::kPublishedScores, path_or_id);
  return ParsePublishedScores(ReadFile(path), path.string());
}

ScoreAudit AuditPublishedScores(std::span<const PublishedScoreRow> rows, double tolerance) {
  ScoreAudit audit{.rows_checked = rows.size(), .tolerance = tolerance};
  for (const PublishedScoreRow& row : rows) {
    const double ratio = BiasCoefficient(row.latimer, row.gpt);
    const double inverse = InverseBiq(row.printed_ratio);
    const double ratio_error = std::abs(row.printed_ratio - ratio);
    const double biq_error = std::abs(row.printed_biq - inverse);
    audit.max_ratio_error = std::max(audit.max_ratio_error, ratio_error);
    audit.max_biq_error = std::max(audit.max_biq_error, biq_error);
    if (ratio_error > tolerance + kComparisonSlack || biq_error > tolerance + kComparisonSlack) {
      audit.violations.push_back({row.prompt_id, ratio, inverse, ratio_error, biq_error});
    }
  }
  return audit;
}

}  // namespace biq
