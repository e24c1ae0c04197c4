#include <gtest/gtest.h>

#include "biq/report.hpp"
#include "support.hpp"

namespace biq {
namespace {

ComparisonTable PublishedMeans() {
  return ComparePublished(LoadCorpus("appendix2"), LoadPublishedScores("appendix2"),
                          AggregateMethod::kMean);
}

TEST(FormatFixed, HalfAwayFromZeroOnDecimalForm) {
  EXPECT_EQ(FormatFixed(1.005), "1.01");
  EXPECT_EQ(FormatFixed(1.004999), "1.00");
  EXPECT_EQ(FormatFixed(-1.005), "-1.01");
  EXPECT_EQ(FormatFixed(0.125, 2), "0.13");
  EXPECT_EQ(FormatFixed(2.675), "2.68");
  EXPECT_EQ(FormatFixed(9.995), "10.00");
  EXPECT_EQ(FormatFixed(0.0), "0.00");
  EXPECT_EQ(FormatFixed(-0.001), "0.00");
  EXPECT_EQ(FormatFixed(123.456, 0), "123");
  EXPECT_EQ(FormatFixed(1e-7, 3), "0.000");
  EXPECT_EQ(FormatFixed(1234567.891, 1), "1234567.9");
}

TEST(FormatFixed, BadDecimalsRejected) {
  EXPECT_BIQ_ERROR(FormatFixed(1.0, -1), ErrorKind::kInvalidInput);
}

TEST(RenderTable, SummaryCsvGenderRow) {
  const std::string body = RenderTable(PublishedMeans(), ReportFormat::kCsv).body;
  EXPECT_EQ(body.substr(0, body.find('\n')), "Category,latimer,gpt35,Bias Coeff,BiQ");
  EXPECT_NE(body.find("\nGender,1.03,0.93,1.11,0.90\n"), std::string::npos) << body;
}

TEST(RenderTable, SummaryHasHeaderPlusFiveRows) {
  const std::string body = RenderTable(PublishedMeans(), ReportFormat::kCsv).body;
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 6);
}

TEST(RenderTable, SingleCategorySingleRow) {
  const std::vector<PromptScore> a = {{1, Category::kFamily, 1.0}};
  const std::vector<PromptScore> b = {{1, Category::kFamily, 2.0}};
  const auto t = CompareScores(a, b, "x", "y", AggregateMethod::kMean);
  EXPECT_EQ(RenderTable(t, ReportFormat::kCsv).body,
            "Category,x,y,Bias Coeff,BiQ\nFamily,1.00,2.00,0.50,2.00\n");
}

TEST(RenderTable, Markdown) {
  const std::string body = RenderTable(PublishedMeans(), ReportFormat::kMarkdown).body;
  EXPECT_EQ(body.substr(0, body.find('\n', body.find('\n') + 1) + 1),
            "| Category | latimer | gpt35 | Bias Coeff | BiQ |\n|---|---:|---:|---:|---:|\n");
  EXPECT_NE(body.find("| Gender | 1.03 | 0.93 | 1.11 | 0.90 |\n"), std::string::npos);
}

TEST(RenderTable, PromptsSection) {
  const std::string body =
      RenderTable(PublishedMeans(), ReportFormat::kCsv, ReportSection::kPrompts).body;
  EXPECT_NE(body.find("\n1,Gender,1.03,1.28,0.80,1.24\n"), std::string::npos);
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 160);
}

TEST(RenderTable, EmptyRejected) {
  EXPECT_BIQ_ERROR(RenderTable(ComparisonTable{}, ReportFormat::kCsv), ErrorKind::kEmptyReport);
  EXPECT_BIQ_ERROR(RenderTable(ComparisonTable{}, ReportFormat::kJson), ErrorKind::kEmptyReport);
}

TEST(TableJson, RoundTripIsExact) {
  const ComparisonTable t = PublishedMeans();
  EXPECT_EQ(TableFromJson(TableToJson(t, {.config_hash = "abc"})), t);
  EXPECT_EQ(RenderTable(t, ReportFormat::kJson).body, TableToJson(t));
}

TEST(TableJson, MalformedRejected) {
  EXPECT_BIQ_ERROR(TableFromJson("{}"), ErrorKind::kParse);
  EXPECT_BIQ_ERROR(TableFromJson("not json"), ErrorKind::kParse);
}

TEST(PlotData, OneRowPerCategory) {
  const ReportDocument doc = EmitPlotData(AggregatePairs(PublishedMeans()));
  EXPECT_EQ(doc.body.substr(0, doc.body.find('\n')),
            "category,model_a_value,model_b_value,ratio,inverse");
  EXPECT_EQ(std::count(doc.body.begin(), doc.body.end(), '\n'), 6);
}

TEST(PlotData, Errors) {
  EXPECT_BIQ_ERROR(EmitPlotData({}), ErrorKind::kEmptyReport);
  const std::vector<AggregatePair> mixed = {
      {AggregateScore{"Race", AggregateMethod::kMean, 1.0, 1},
       AggregateScore{"Gender", AggregateMethod::kMean, 1.0, 1}}};
  EXPECT_BIQ_ERROR(EmitPlotData(mixed), ErrorKind::kInvalidInput);
}

TEST(Names, RoundTrip) {
  for (auto f : {ReportFormat::kCsv, ReportFormat::kMarkdown, ReportFormat::kJson}) {
    EXPECT_EQ(ParseReportFormat(ReportFormatName(f)), f);
  }
  EXPECT_BIQ_ERROR(ParseReportFormat("xml"), ErrorKind::kConfiguration);
  EXPECT_EQ(ParseReportSection("prompts"), ReportSection::kPrompts);
}

}  // namespace
}  // namespace biq
