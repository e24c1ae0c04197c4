#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biq/metric.hpp"
#include "biq/pipeline.hpp"

namespace biq {

enum class ReportFormat { kCsv, kMarkdown, kJson };
enum class ReportSection { kSummary, kPrompts };

std::string_view ReportFormatName(ReportFormat format);
ReportFormat ParseReportFormat(std::string_view name);
std::string_view ReportSectionName(ReportSection section);
ReportSection ParseReportSection(std::string_view name);

/// Rounds half away from zero on the 15-significant-digit decimal form of
/// `value`, so 1.005 renders as "1.01" even though its binary value is lower.
std::string FormatFixed(double value, int decimals = 2);

struct ReportMetadata {
  std::string model_a;
  std::string model_b;
  AggregateMethod method = AggregateMethod::kMean;
  std::string config_hash;  // omitted from output when empty
  std::string generated_at;  // omitted from output when empty
};

struct ReportDocument {
  ReportFormat format = ReportFormat::kCsv;
  std::string body;
  ReportMetadata metadata;
};

/// CSV and markdown show one section with 2-decimal display values; JSON
/// always carries the whole table at full precision.
/// Throws kEmptyReport when the rendered section has no rows.
ReportDocument RenderTable(const ComparisonTable& table, ReportFormat format,
                           ReportSection section = ReportSection::kSummary,
                           const ReportMetadata& extra = {});

std::string TableToJson(const ComparisonTable& table, const ReportMetadata& metadata = {});
/// Throws kParse on malformed input.
ComparisonTable TableFromJson(std::string_view json_text);

using AggregatePair = std::pair<AggregateScore, AggregateScore>;

/// Category aggregates of both models, in table order.
std::vector<AggregatePair> AggregatePairs(const ComparisonTable& table);

/// CSV series `category,model_a_value,model_b_value,ratio,inverse` at full
/// precision. Throws kInvalidInput when a pair's categories differ.
ReportDocument EmitPlotData(std::span<const AggregatePair> aggregates);

}  // namespace biq
