// Acceptance gate: one PASS/FAIL line per primary criterion, exit 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "biq/cli.hpp"
#include "biq/corpus.hpp"
#include "biq/io.hpp"
#include "biq/metric.hpp"
#include "biq/monitor.hpp"
#include "biq/pipeline.hpp"
#include "biq/rag.hpp"
#include "biq/report.hpp"
#include "rag_scenario.hpp"

namespace biq {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Check(bool ok, std::string what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok   " : "FAIL ") + std::move(what));
  }
  void Note(std::string what) { notes.push_back("note " + std::move(what)); }
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double Derived(const std::string& key) {
  static const nlohmann::json values = nlohmann::json::parse(
      ReadFile(std::filesystem::path(BIQ_TEST_GOLDEN_DIR) / "derived_values.json"));
  return values.at(key).get<double>();
}

FactorVector Unit(double b, double p, double s, double c, double m, double a) {
  FactorVector f;
  f.bias_scores = {b};
  f.dimension_weights = {1.0};
  f.diversity_penalty = p;
  f.sentiment_bias = s;
  f.context_sensitivity = c;
  f.mitigation = m;
  f.adaptability = a;
  return f;
}

int Cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = RunCli(args, o, e);
  if (out != nullptr) *out = o.str();
  return code;
}

Outcome WorkedExamples() {
  Outcome r;
  const double ex1 = ComputeBiq(Unit(0.25, 0.055, 0.1, 0.8, 0.7, 0.8)).value;
  const double ex2 = ComputeBiq(Unit(0.15, 0.03, 0.05, 0.85, 0.9, 0.9)).value;
  const double gpt = ComputeBiq(Unit(0.5, 0.15, 0.25, 0.5, 0.2, 0.4)).value;
  r.Check(std::abs(ex1 - 1.105) <= 1e-12, fmt::format("example 1 latimer {:.15g} vs 1.105", ex1));
  r.Check(std::abs(ex2 - 1.08) <= 1e-12, fmt::format("example 2 latimer {:.15g} vs 1.08", ex2));
  r.Check(std::abs(gpt - 1.20) <= 1e-12, fmt::format("example 1 chatgpt {:.15g} vs 1.20", gpt));
  r.Note(fmt::format("printed chatgpt total 1.4 differs from its summands by {:.2f}; not replicated",
                     1.4 - gpt));
  return r;
}

Outcome TableAudit() {
  Outcome r;
  const auto start = Clock::now();
  const auto rows = LoadPublishedScores("appendix2");
  double worst_ratio = 0.0, worst_biq = 0.0;
  for (const PublishedScoreRow& row : rows) {
    worst_ratio = std::max(worst_ratio, std::abs(row.printed_ratio - row.latimer / row.gpt));
    worst_biq = std::max(worst_biq, std::abs(row.printed_biq - 1.0 / row.printed_ratio));
  }
  r.Check(rows.size() == 159, fmt::format("{} rows", rows.size()));
  r.Check(worst_ratio <= 0.02, fmt::format("max |ratio - a/b| = {:.4f}", worst_ratio));
  r.Check(worst_biq <= 0.02, fmt::format("max |biq - 1/ratio| = {:.4f}", worst_biq));
  std::string out;
  const int code = Cli({"audit", "--published", "appendix2"}, &out);
  r.Check(code == 0 && out.find("violations: 0\n") != std::string::npos,
          fmt::format("audit subcommand exit {} with zero violations", code));
  const double s = Seconds(start);
  r.Check(s < 1.0, fmt::format("{:.3f} s", s));
  return r;
}

struct PrintedRow {
  Category category;
  double a, b, ratio, inverse;
};

Outcome AggregateReproduction() {
  Outcome r;
  const auto start = Clock::now();
  const PromptCorpus corpus = LoadCorpus("appendix2");
  const auto rows = LoadPublishedScores("appendix2");
  const std::vector<PrintedRow> means = {{Category::kGender, 1.03, 0.93, 1.11, 0.90},
                                         {Category::kRace, 1.08, 0.95, 1.13, 0.88},
                                         {Category::kSocialClass, 1.13, 0.88, 1.27, 0.79},
                                         {Category::kLgbtq, 1.01, 1.05, 0.97, 1.04},
                                         {Category::kFamily, 0.92, 0.95, 0.97, 1.03}};
  const std::vector<PrintedRow> medians = {{Category::kGender, 1.00, 0.79, 1.27, 0.79},
                                           {Category::kRace, 1.04, 0.91, 1.15, 0.87},
                                           {Category::kSocialClass, 1.02, 0.85, 1.20, 0.84},
                                           {Category::kLgbtq, 0.98, 1.06, 0.92, 1.09},
                                           {Category::kFamily, 0.89, 0.88, 1.01, 0.99}};
  for (const auto& [method, printed] :
       {std::pair{AggregateMethod::kMean, means}, std::pair{AggregateMethod::kMedian, medians}}) {
    const ComparisonTable table = ComparePublished(corpus, rows, method);
    for (const PrintedRow& p : printed) {
      const auto it = std::find_if(table.categories.begin(), table.categories.end(),
                                   [&](const CategoryRow& c) { return c.category == p.category; });
      if (it == table.categories.end()) {
        r.Check(false, fmt::format("{} missing", CategoryName(p.category)));
        continue;
      }
      const double err = std::max({std::abs(it->score_a - p.a), std::abs(it->score_b - p.b),
                                   std::abs(it->ratio - p.ratio), std::abs(it->inverse - p.inverse)});
      r.Check(err <= 0.03, fmt::format("{} {}: {:.4f} {:.4f} {:.4f} {:.4f} (max error {:.4f})",
                                       AggregateMethodName(method), CategoryName(p.category),
                                       it->score_a, it->score_b, it->ratio, it->inverse, err));
    }
  }
  const double s = Seconds(start);
  r.Check(s < 1.0, fmt::format("{:.3f} s", s));
  return r;
}

Outcome ContextRule() {
  Outcome r;
  const EvalConfig config;
  for (Category c : kAllCategories) {
    const double expected = c == Category::kRace          ? 0.55
                            : c == Category::kSocialClass ? 0.525
                                                          : 0.50;
    const double got = ContextSensitivityFor(c, config);
    r.Check(got == expected, fmt::format("{} -> {:.17g}", CategoryName(c), got));
  }
  return r;
}

Outcome PropertySuite() {
  Outcome r;
  r.Note("live per-prompt scores are not reproducible; replaced by the properties below");

  // Replay byte-determinism across repeated runs and concurrency levels.
  const PromptCorpus corpus = LoadCorpus("appendix2");
  const auto fixtures = std::make_shared<const FixtureSet>(FixtureSet::Load(
      std::filesystem::path(BIQ_TEST_DATA_DIR) / "fixtures" / "appendix2_replay.jsonl"));
  const Evaluator evaluator = Evaluator::FromConfig(EvalConfig{});
  std::string first;
  bool identical = true;
  for (int concurrency : {1, 4, 16, 1, 16}) {
    ReplayGateway gateway(fixtures, "gpt35");
    const std::string bytes =
        WriteRecords(RunEvaluation(corpus, gateway, evaluator, {concurrency}).records);
    if (first.empty()) first = bytes;
    identical = identical && bytes == first;
  }
  r.Check(identical && !first.empty(), "replay output byte-identical over 5 runs at 1/4/16 threads");

  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kVectors = 10'000;
  int violations = 0;
  for (int t = 0; t < kVectors; ++t) {
    FactorVector f = Unit(unit(gen), unit(gen), unit(gen), unit(gen), unit(gen), unit(gen));
    f.dimension_weights[0] = unit(gen);
    f.diversity_weight = unit(gen);
    f.lambda = unit(gen);
    f.mu = unit(gen);
    f.theta = unit(gen);
    f.phi = unit(gen);
    const double base = ComputeBiq(f).value;
    auto raised = [&](double FactorVector::*field) {
      FactorVector g = f;
      g.*field += (1.0 - g.*field) * unit(gen);
      return ComputeBiq(g).value;
    };
    FactorVector g = f;
    g.bias_scores[0] += (1.0 - g.bias_scores[0]) * unit(gen);
    if (ComputeBiq(g).value < base) ++violations;
    if (raised(&FactorVector::sentiment_bias) < base) ++violations;
    if (raised(&FactorVector::context_sensitivity) < base) ++violations;
    if (raised(&FactorVector::mitigation) < base) ++violations;
    if (raised(&FactorVector::adaptability) > base) ++violations;
  }
  r.Check(violations == 0,
          fmt::format("monotone in b, s, C, M and anti-monotone in A over {} vectors ({} violations)",
                      kVectors, violations));

  bool even = true;
  std::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
  for (int t = 0; t < kVectors; ++t) {
    const double p = signed_unit(gen);
    even = even && SentimentBias({.polarity = p}) == SentimentBias({.polarity = -p});
  }
  r.Check(even, fmt::format("sentiment bias even over {} polarities", kVectors));

  bool bounded = true;
  const BiasLexicon lexicon = BiasLexicon::Resolve("default");
  for (int t = 0; t < kVectors; ++t) {
    std::vector<GroupMention> mentions;
    const int n = static_cast<int>(gen() % 10);
    for (int i = 0; i < n; ++i) {
      const BiasDimension& d = lexicon.dimensions()[gen() % lexicon.dimensions().size()];
      GroupMention m;
      m.dimension = d.name;
      m.group = d.groups[gen() % d.groups.size()].group;
      m.context_polarity = signed_unit(gen);
      mentions.push_back(std::move(m));
    }
    for (const DimensionStats& d : GroupDisparity(mentions, lexicon).dimensions) {
      const double b = IntegrateBiasScore(d.polarity_spread, d.positive_share_spread);
      bounded = bounded && b >= 0.0 && b <= 1.0;
    }
    const double b = IntegrateBiasScore(2.0 * unit(gen), unit(gen), {unit(gen), unit(gen)});
    bounded = bounded && b >= 0.0 && b <= 1.0;
  }
  r.Check(bounded, fmt::format("b in [0, 1] over {} random disparity inputs", kVectors));
  return r;
}

Outcome RagSimulator() {
  Outcome r;
  const Evaluator evaluator = Evaluator::FromConfig(EvalConfig{});
  SimulationOptions options;
  options.rounds = 10;
  options.eta = 0.3;
  const auto rounds = SimulateReweighting(testing::ScenarioPool(), testing::ScenarioCorpus(),
                                          evaluator, options);
  r.Check(rounds.size() == 10, fmt::format("{} rounds", rounds.size()));
  if (rounds.empty()) return r;

  double min_biased_contribution = 1.0;
  double max_neutral_contribution = 0.0;
  for (const SimulationRound& round : rounds) {
    for (const BiasContribution& c : round.contributions) {
      if (testing::ScenarioBiased(std::stoi(c.doc_id.substr(3)))) {
        min_biased_contribution = std::min(min_biased_contribution, c.contribution);
      } else {
        max_neutral_contribution = std::max(max_neutral_contribution, c.contribution);
      }
    }
  }
  r.Check(min_biased_contribution >= 0.5,
          fmt::format("5 biased docs attributed >= 0.5 every round (min {:.3f})",
                      min_biased_contribution));
  r.Check(max_neutral_contribution == 0.0, "15 other docs attributed 0 every round");

  double max_biased_weight = 0.0;
  bool neutral_unchanged = true;
  for (const WeightedDocument& d : rounds.back().weights_after) {
    if (testing::ScenarioBiased(std::stoi(d.doc_id.substr(3)))) {
      max_biased_weight = std::max(max_biased_weight, d.weight);
    } else {
      neutral_unchanged = neutral_unchanged && d.weight == 1.0;
    }
  }
  r.Check(max_biased_weight < 0.05,
          fmt::format("biased weights after 10 rounds at eta 0.3: {:.6f} < 0.05", max_biased_weight));
  r.Check(neutral_unchanged, "zero-contribution weights unchanged");
  r.Note(fmt::format("a contribution of exactly 0.5 would leave {:.4f}; below 0.05 needs > {:.4f}",
                     Derived("reweight_10_rounds_c05"),
                     Derived("reweight_min_contribution_below_005")));

  const std::vector<std::size_t> counts = {3, 1};
  const double h = NormalizedEntropy(counts);
  const double oracle = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)) / std::log(2.0);
  r.Check(std::abs(h - oracle) <= 1e-6,
          fmt::format("entropy (3,1) = {:.10f}, hand oracle {:.10f}", h, oracle));
  r.Check(FormatFixed(h, 4) == "0.8113", fmt::format("entropy (3,1) to 4 places = {}",
                                                     FormatFixed(h, 4)));
  return r;
}

Outcome Monitor() {
  Outcome r;
  const MonitorConfig config{.threshold = 1.0, .ewma_alpha = 0.5};
  MonitorState state;
  std::vector<Alert> alerts;
  std::vector<double> ewma;
  for (double x : {0.8, 1.4, 1.4}) {
    const MonitorStep step = MonitorUpdate(state, x, config);
    if (step.alert) alerts.push_back(*step.alert);
    state = step.state;
    ewma.push_back(state.ewma);
  }
  r.Check(alerts.size() == 1, fmt::format("{} alert(s)", alerts.size()));
  if (!alerts.empty()) {
    r.Check(alerts[0].index == 1 && std::abs(alerts[0].ewma - 1.1) <= 1e-12,
            fmt::format("alert at index {} with ewma {:.15g}", alerts[0].index, alerts[0].ewma));
  }
  r.Check(state.latched && std::abs(ewma[2] - 1.25) <= 1e-12,
          fmt::format("index 2 latched at ewma {:.15g}, no second alert", ewma[2]));

  const auto start = Clock::now();
  MonitorHub hub(MonitorConfig{.threshold = 1.0});
  std::size_t quiet_alerts = 0;
  for (int i = 0; i < 1'000'000; ++i) quiet_alerts += hub.Observe("m", std::nullopt, 0.9).has_value();
  const double s = Seconds(start);
  r.Check(quiet_alerts == 0, fmt::format("{} alerts over 10^6 sub-threshold samples", quiet_alerts));
  r.Check(s < 1.0, fmt::format("10^6 samples in {:.3f} s", s));
  return r;
}

Outcome EndToEnd() {
  Outcome r;
  const auto dir = std::filesystem::temp_directory_path() /
                   fmt::format("biq-acceptance-{}", std::random_device{}());
  std::filesystem::create_directories(dir);
  const std::string a = (dir / "latimer.jsonl").string();
  const std::string b = (dir / "gpt35.jsonl").string();
  const std::string table = (dir / "table.json").string();

  const auto start = Clock::now();
  const int e1 = Cli({"evaluate", "--corpus", "appendix2", "--model", "latimer", "--adapter",
                      "replay", "--fixtures", "appendix2", "--out", a});
  const int e2 = Cli({"evaluate", "--corpus", "appendix2", "--model", "gpt35", "--adapter",
                      "replay", "--fixtures", "appendix2", "--out", b});
  const int c = Cli({"compare", "--left", a, "--right", b, "--out", table});
  std::string report;
  const int rep = Cli({"report", "--table", table, "--format", "markdown"}, &report);
  const double s = Seconds(start);
  std::filesystem::remove_all(dir);

  r.Check(e1 == 0 && e2 == 0 && c == 0 && rep == 0,
          fmt::format("exit codes evaluate {} {}, compare {}, report {}", e1, e2, c, rep));
  r.Check(s < 5.0, fmt::format("evaluate x2 -> compare -> report in {:.3f} s", s));

  const std::string golden =
      ReadFile(std::filesystem::path(BIQ_TEST_GOLDEN_DIR) / "e2e_gender_row.md");
  std::string gender_row;
  std::istringstream lines(report);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("| Gender |", 0) == 0) gender_row = line + "\n";
  }
  r.Check(gender_row == golden, fmt::format("Gender row '{}' matches golden",
                                            gender_row.substr(0, gender_row.size() - 1)));
  return r;
}

}  // namespace
}  // namespace biq

int main() {
  struct Criterion {
    const char* name;
    std::function<biq::Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"worked-examples", biq::WorkedExamples},
      {"table-audit", biq::TableAudit},
      {"aggregate-reproduction", biq::AggregateReproduction},
      {"context-sensitivity", biq::ContextRule},
      {"property-suite", biq::PropertySuite},
      {"rag-simulator", biq::RagSimulator},
      {"monitor", biq::Monitor},
      {"end-to-end", biq::EndToEnd},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    biq::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.notes.push_back(std::string("FAIL exception: ") + e.what());
    }
    std::printf("%s %s\n", outcome.pass ? "PASS" : "FAIL", c.name);
    for (const std::string& n : outcome.notes) std::printf("    %s\n", n.c_str());
    failed += outcome.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
