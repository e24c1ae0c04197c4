#include "biq/report.hpp"

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "biq/csv.hpp"
#include "biq/error.hpp"

namespace biq {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr int kSignificantDigits = 15;

std::string MarkdownRow(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const std::string& c : cells) {
    out += ' ';
    for (char ch : c) {
      if (ch == '|') out += '\\';
      out += ch;
    }
    out += " |";
  }
  out += '\n';
  return out;
}

std::string MarkdownTable(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows,
                          std::size_t text_columns) {
  std::string out = MarkdownRow(header);
  out += '|';
  for (std::size_t i = 0; i < header.size(); ++i) out += i < text_columns ? "---|" : "---:|";
  out += '\n';
  for (const auto& row : rows) out += MarkdownRow(row);
  return out;
}

}  // namespace

std::string_view ReportFormatName(ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kMarkdown: return "markdown";
    case ReportFormat::kJson: return "json";
  }
  return "csv";
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "json") return ReportFormat::kJson;
  throw Error(ErrorKind::kConfiguration, fmt::format("unknown report format '{}'", name));
}

std::string_view ReportSectionName(ReportSection section) {
  return section == ReportSection::kPrompts ? "prompts" : "summary";
}

ReportSection ParseReportSection(std::string_view name) {
  if (name == "summary") return ReportSection::kSummary;
  if (name == "prompts") return ReportSection::kPrompts;
  throw Error(ErrorKind::kConfiguration, fmt::format("unknown report section '{}'", name));
}

std::string FormatFixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  if (decimals < 0 || decimals > 12) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("unsupported decimal count {}", decimals));
  }

  // d.dddddddddddddde±X: the value is 0.<digits> x 10^(exponent + 1).
  const std::string sci = fmt::format("{:.{}e}", std::fabs(value), kSignificantDigits - 1);
  std::string digits = sci.substr(0, 1) + sci.substr(2, kSignificantDigits - 1);
  const int exponent = std::stoi(sci.substr(sci.find('e') + 1));

  // Digits of round(|value| * 10^decimals), most significant first.
  const int keep = exponent + 1 + decimals;
  std::string scaled;
  if (keep >= 0) {
    if (keep > static_cast<int>(digits.size())) digits.append(keep - digits.size(), '0');
    scaled = digits.substr(0, keep);
    const bool round_up = keep < static_cast<int>(digits.size()) && digits[keep] >= '5';
    if (round_up) {
      int i = static_cast<int>(scaled.size()) - 1;
      for (; i >= 0 && scaled[i] == '9'; --i) scaled[i] = '0';
      if (i >= 0) {
        ++scaled[i];
      } else {
        scaled.insert(scaled.begin(), '1');
      }
    }
  }
  if (scaled.size() < static_cast<std::size_t>(decimals) + 1) {
    scaled.insert(0, decimals + 1 - scaled.size(), '0');
  }
  const bool zero = scaled.find_first_not_of('0') == std::string::npos;
  std::string out = (value < 0 && !zero) ? "-" : "";
  out += scaled.substr(0, scaled.size() - decimals);
  if (decimals > 0) {
    out += '.';
    out += scaled.substr(scaled.size() - decimals);
  }
  return out;
}

std::string TableToJson(const ComparisonTable& table, const ReportMetadata& metadata) {
  ojson rows = ojson::array();
  for (const ComparisonRow& r : table.rows) {
    rows.push_back({{"prompt_id", r.prompt_id},
                    {"category", CategoryName(r.category)},
                    {"score_a", r.score_a},
                    {"score_b", r.score_b},
                    {"ratio", r.ratio},
                    {"inverse", r.inverse}});
  }
  ojson categories = ojson::array();
  for (const CategoryRow& c : table.categories) {
    categories.push_back({{"category", CategoryName(c.category)},
                          {"count", c.count},
                          {"score_a", c.score_a},
                          {"score_b", c.score_b},
                          {"ratio", c.ratio},
                          {"inverse", c.inverse}});
  }
  ojson j = {{"model_a", table.model_a},
             {"model_b", table.model_b},
             {"method", AggregateMethodName(table.method)},
             {"categories", std::move(categories)},
             {"rows", std::move(rows)}};
  if (!metadata.config_hash.empty()) j["config_hash"] = metadata.config_hash;
  if (!metadata.generated_at.empty()) j["generated_at"] = metadata.generated_at;
  return j.dump(2) + "\n";
}

ComparisonTable TableFromJson(std::string_view json_text) {
  auto category = [](const json& v) {
    const auto c = ParseCategory(v.get<std::string>());
    if (!c) throw Error(ErrorKind::kParse, fmt::format("unknown category {}", v.dump()));
    return *c;
  };
  try {
    const json j = json::parse(json_text);
    ComparisonTable table;
    table.model_a = j.at("model_a").get<std::string>();
    table.model_b = j.at("model_b").get<std::string>();
    try {
      table.method = ParseAggregateMethod(j.at("method").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, e.what());
    }
    for (const json& r : j.at("rows")) {
      table.rows.push_back({r.at("prompt_id").get<int>(), category(r.at("category")),
                            r.at("score_a").get<double>(), r.at("score_b").get<double>(),
                            r.at("ratio").get<double>(), r.at("inverse").get<double>()});
    }
    for (const json& c : j.at("categories")) {
      table.categories.push_back({category(c.at("category")), c.at("count").get<std::size_t>(),
                                  c.at("score_a").get<double>(), c.at("score_b").get<double>(),
                                  c.at("ratio").get<double>(), c.at("inverse").get<double>()});
    }
    return table;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("bad comparison table: {}", e.what()));
  }
}

ReportDocument RenderTable(const ComparisonTable& table, ReportFormat format,
                           ReportSection section, const ReportMetadata& extra) {
  ReportDocument doc{format, {}, extra};
  doc.metadata.model_a = table.model_a;
  doc.metadata.model_b = table.model_b;
  doc.metadata.method = table.method;

  if (format == ReportFormat::kJson) {
    if (table.rows.empty() && table.categories.empty()) {
      throw Error(ErrorKind::kEmptyReport, "comparison table has no rows");
    }
    doc.body = TableToJson(table, doc.metadata);
    return doc;
  }

  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t text_columns = 0;
  if (section == ReportSection::kSummary) {
    if (table.categories.empty()) {
      throw Error(ErrorKind::kEmptyReport, "comparison table has no category rows");
    }
    header = {"Category", table.model_a, table.model_b, "Bias Coeff", "BiQ"};
    text_columns = 1;
    for (const CategoryRow& c : table.categories) {
      rows.push_back({std::string(CategoryName(c.category)), FormatFixed(c.score_a),
                      FormatFixed(c.score_b), FormatFixed(c.ratio), FormatFixed(c.inverse)});
    }
  } else {
    if (table.rows.empty()) throw Error(ErrorKind::kEmptyReport, "comparison table has no rows");
    header = {"ID", "Category", table.model_a, table.model_b, "Bias Coeff", "BiQ"};
    text_columns = 2;
    for (const ComparisonRow& r : table.rows) {
      rows.push_back({std::to_string(r.prompt_id), std::string(CategoryName(r.category)),
                      FormatFixed(r.score_a), FormatFixed(r.score_b), FormatFixed(r.ratio),
                      FormatFixed(r.inverse)});
    }
  }

  if (format == ReportFormat::kCsv) {
    doc.body = csv::Row(header);
    for (const auto& row : rows) doc.body += csv::Row(row);
  } else {
    doc.body = MarkdownTable(header, rows, text_columns);
  }
  return doc;
}

std::vector<AggregatePair> AggregatePairs(const ComparisonTable& table) {
  std::vector<AggregatePair> pairs;
  for (const CategoryRow& c : table.categories) {
    const std::string name(CategoryName(c.category));
    pairs.emplace_back(AggregateScore{name, table.method, c.score_a, c.count},
                       AggregateScore{name, table.method, c.score_b, c.count});
  }
  return pairs;
}

ReportDocument EmitPlotData(std::span<const AggregatePair> aggregates) {
  if (aggregates.empty()) throw Error(ErrorKind::kEmptyReport, "no category aggregates to plot");
  ReportDocument doc{ReportFormat::kCsv, csv::Row({"category", "model_a_value", "model_b_value",
                                                   "ratio", "inverse"}),
                     {}};
  doc.metadata.method = aggregates.front().first.method;
  for (const auto& [a, b] : aggregates) {
    if (a.category != b.category) {
      throw Error(ErrorKind::kInvalidInput,
                  fmt::format("plot pair mixes categories '{}' and '{}'", a.category, b.category));
    }
    const double ratio = BiasCoefficient(a.value, b.value);
    doc.body += csv::Row({a.category, fmt::format("{}", a.value), fmt::format("{}", b.value),
                          fmt::format("{}", ratio), fmt::format("{}", InverseBiq(ratio))});
  }
  return doc;
}

}  // namespace biq
