#include "biq/cli.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "biq/corpus.hpp"
#include "biq/data.hpp"
#include "biq/error.hpp"
#include "biq/gateway.hpp"
#include "biq/io.hpp"
#include "biq/metric.hpp"
#include "biq/monitor.hpp"
#include "biq/pipeline.hpp"
#include "biq/rag.hpp"
#include "biq/report.hpp"

namespace biq {
namespace {

struct Options {
  // shared
  std::string corpus = "appendix2";
  std::string config_path;
  std::string preset;
  std::string mode;
  std::string method = "mean";
  std::string format;
  std::string section = "summary";
  std::string out;
  std::string lexicon;
  std::string bias_lexicon;
  bool plot = false;
  // evaluate
  std::string model;
  std::string adapter = "replay";
  std::string fixtures = "appendix2";
  std::string failures_out;
  std::optional<int> concurrency;
  std::optional<std::int64_t> seed;
  std::optional<double> failure_threshold;
  // compare / aggregate / report
  std::string left;
  std::string right;
  std::string published;
  std::string records;
  std::string table;
  // rag-sim
  std::string pool = "demo";
  std::size_t rounds = 10;
  double eta = 0.3;
  std::size_t top_k = 3;
  std::string pool_out;
  std::string traces_out;
  bool feedback = false;
  // monitor
  std::string input;
  std::optional<double> threshold;
  double alpha = 0.3;
  std::size_t min_samples = 1;
  double gain = 0.5;
  std::string alerts_out;
  // audit
  double tolerance = kPublishedRoundingTolerance;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int Evaluate();
  int Compare();
  int Aggregate();
  int Report();
  int RagSim();
  int Monitor();
  int Audit();

  Options opt;

 private:
  void Emit(const std::string& content, const std::string& path) {
    if (path.empty() || path == "-") {
      out_ << content;
      out_.flush();
    } else {
      WriteFileAtomic(path, content);
    }
  }

  EvalConfig ResolveConfig() {
    EvalConfig config;
    if (!opt.config_path.empty()) {
      std::error_code ec;
      if (!std::filesystem::exists(opt.config_path, ec)) {
        err_ << fmt::format("warning: config '{}' not found; using built-in defaults\n",
                            opt.config_path);
      }
      config = LoadConfig(opt.config_path);
    }
    if (!opt.preset.empty()) config.preset = ParsePreset(opt.preset);
    if (!opt.mode.empty()) config.mode = ParseEvalMode(opt.mode);
    if (!opt.lexicon.empty()) config.sentiment_lexicon = opt.lexicon;
    if (!opt.bias_lexicon.empty()) config.bias_lexicon = opt.bias_lexicon;
    if (opt.concurrency) config.gateway.max_concurrency = *opt.concurrency;
    if (opt.seed) config.gateway.seed = *opt.seed;
    if (opt.failure_threshold) config.failure_threshold = *opt.failure_threshold;
    config.Validate();
    return config;
  }

  ReportFormat Format(ReportFormat fallback) const {
    return opt.format.empty() ? fallback : ParseReportFormat(opt.format);
  }

  void EmitTable(const ComparisonTable& table, ReportFormat fallback) {
    if (opt.plot) {
      const auto pairs = AggregatePairs(table);
      Emit(EmitPlotData(pairs).body, opt.out);
      return;
    }
    Emit(RenderTable(table, Format(fallback), ParseReportSection(opt.section)).body, opt.out);
  }

  std::ostream& out_;
  std::ostream& err_;
};

int Cli::Evaluate() {
  const EvalConfig config = ResolveConfig();
  if (!config.diversity_penalty.contains(opt.model)) {
    throw Error(ErrorKind::kConfiguration,
                fmt::format("no diversity_penalty configured for model '{}'", opt.model));
  }
  const PromptCorpus corpus = LoadCorpus(opt.corpus);

  std::unique_ptr<ModelGateway> gateway;
  if (opt.adapter == "replay") {
    auto fixtures = std::make_shared<FixtureSet>(
        FixtureSet::Load(ResolveInput(BundleKind::kFixtures, opt.fixtures)));
    for (const std::string& w : fixtures->warnings()) err_ << "warning: " << w << '\n';
    gateway = std::make_unique<ReplayGateway>(std::move(fixtures), opt.model);
  } else if (opt.adapter == "http") {
    gateway = std::make_unique<HttpGateway>(config.gateway, opt.model);
  } else {
    throw Error(ErrorKind::kConfiguration, fmt::format("unknown adapter '{}'", opt.adapter));
  }

  const Evaluator evaluator = Evaluator::FromConfig(config);
  const EvaluationRun run =
      RunEvaluation(corpus, *gateway, evaluator, RunOptions{config.gateway.max_concurrency});

  // Partial results are persisted before any threshold decision.
  Emit(WriteRecords(run.records), opt.out);
  for (const std::string& w : run.warnings) err_ << "warning: " << w << '\n';
  std::string failure_lines;
  constexpr std::size_t kShownFailures = 10;
  for (std::size_t i = 0; i < run.failures.size(); ++i) {
    const PromptFailure& f = run.failures[i];
    if (i < kShownFailures) {
      err_ << fmt::format("prompt {}: {}: {}\n", f.prompt_id, ErrorKindName(f.kind), f.message);
    } else if (i == kShownFailures) {
      err_ << fmt::format("... {} more failures\n", run.failures.size() - kShownFailures);
    }
    failure_lines += nlohmann::ordered_json{{"prompt_id", f.prompt_id},
                                            {"kind", ErrorKindName(f.kind)},
                                            {"message", f.message}}
                         .dump() +
                     "\n";
  }
  if (!opt.failures_out.empty()) WriteFileAtomic(opt.failures_out, failure_lines);
  err_ << fmt::format("{}: {} of {} prompts scored, config {}\n", opt.model, run.records.size(),
                      run.attempted, evaluator.config_hash());

  if (run.ExceedsThreshold(config.failure_threshold)) {
    const bool transport = std::all_of(run.failures.begin(), run.failures.end(), [](const auto& f) {
      return f.kind == ErrorKind::kTransport || f.kind == ErrorKind::kTimeout;
    });
    err_ << fmt::format("error: {:.1f}% of prompts failed (threshold {:.1f}%)\n",
                        100.0 * run.FailureFraction(), 100.0 * config.failure_threshold);
    return transport ? kExitTransport : kExitPartial;
  }
  return kExitOk;
}

int Cli::Compare() {
  const auto left = LoadRecords(opt.left);
  const auto right = LoadRecords(opt.right);
  const ComparisonTable table = CompareModels(left, right, ParseAggregateMethod(opt.method));
  EmitTable(table, ReportFormat::kJson);
  return kExitOk;
}

int Cli::Aggregate() {
  const AggregateMethod method = ParseAggregateMethod(opt.method);
  if (!opt.records.empty()) {
    const auto records = LoadRecords(opt.records);
    std::map<Category, std::vector<double>> by_category;
    for (const EvaluationRecord& r : records) by_category[r.category].push_back(r.biq);
    std::string body = "category,count,value\n";
    for (Category c : kAllCategories) {
      const auto it = by_category.find(c);
      if (it == by_category.end()) continue;
      const AggregateScore s = AggregateScores(it->second, method, std::string(CategoryName(c)));
      body += fmt::format("{},{},{}\n", s.category, s.count, FormatFixed(s.value));
    }
    Emit(body, opt.out);
    return kExitOk;
  }
  const std::string published = opt.published.empty() ? "appendix2" : opt.published;
  const ComparisonTable table =
      ComparePublished(LoadCorpus(opt.corpus), LoadPublishedScores(published), method);
  EmitTable(table, ReportFormat::kCsv);
  return kExitOk;
}

int Cli::Report() {
  const ComparisonTable table = TableFromJson(ReadFile(opt.table));
  EmitTable(table, ReportFormat::kMarkdown);
  return kExitOk;
}

int Cli::RagSim() {
  EvalConfig config = ResolveConfig();
  const Evaluator evaluator = Evaluator::FromConfig(config);
  const PromptCorpus corpus = LoadCorpus(opt.corpus);
  const DocumentPool pool = DocumentPool::Resolve(opt.pool);

  SimulationOptions sim{.rounds = opt.rounds, .eta = opt.eta, .top_k = opt.top_k};
  if (!opt.model.empty()) sim.model_id = opt.model;

  std::optional<MonitorHub> hub;
  if (opt.feedback) {
    // Threshold is fixed after the first round when not given explicitly.
    sim.adjust_eta = [&](double mean_biq, double eta) {
      if (!hub) {
        hub.emplace(MonitorConfig{opt.threshold.value_or(mean_biq + kDefaultThresholdMargin),
                                  opt.alpha, opt.min_samples, opt.gain});
      }
      if (auto alert = hub->Observe(sim.model_id, std::nullopt, mean_biq)) {
        err_ << AlertToJson(*alert) << '\n';
      }
      return FeedbackAdjust(*hub->State(sim.model_id, std::nullopt), eta, hub->config());
    };
  }

  const auto rounds = SimulateReweighting(pool, corpus, evaluator, sim);
  std::string body;
  for (const SimulationRound& r : rounds) {
    nlohmann::ordered_json weights = nlohmann::ordered_json::object();
    for (const WeightedDocument& d : r.weights_after) weights[d.doc_id] = d.weight;
    nlohmann::ordered_json contributions = nlohmann::ordered_json::object();
    for (const BiasContribution& c : r.contributions) {
      if (c.contribution > 0.0) contributions[c.doc_id] = c.contribution;
    }
    body += nlohmann::ordered_json{{"round", r.round},
                                   {"eta", r.eta},
                                   {"mean_biq", r.mean_biq},
                                   {"source_diversity", r.source_diversity},
                                   {"topic_diversity", r.topic_diversity},
                                   {"contributions", contributions},
                                   {"weights", weights}}
                .dump() +
            "\n";
  }
  Emit(body, opt.out);
  if (!rounds.empty()) {
    if (!opt.pool_out.empty()) {
      WriteFileAtomic(opt.pool_out,
                      DocumentPool(rounds.back().weights_after, pool.weight_floor()).ToJsonLines());
    }
    if (!opt.traces_out.empty()) {
      WriteFileAtomic(opt.traces_out, TracesToJsonLines(rounds.back().traces));
    }
  }
  return kExitOk;
}

int Cli::Monitor() {
  const auto samples = ParseMonitorSamples(ReadFile(opt.input), opt.input);
  double threshold = 0.0;
  if (opt.threshold) {
    threshold = *opt.threshold;
  } else {
    if (samples.empty()) throw Error(ErrorKind::kEmptyAggregate, "no samples to derive a threshold");
    std::vector<double> scores;
    for (const MonitorSample& s : samples) scores.push_back(s.biq);
    threshold = DefaultThreshold(scores);
    err_ << fmt::format("threshold {} (median + {}); tune for your deployment\n", threshold,
                        kDefaultThresholdMargin);
  }
  MonitorHub hub(MonitorConfig{threshold, opt.alpha, opt.min_samples, opt.gain});

  std::string alerts;
  std::map<std::pair<std::string, std::optional<std::string>>, std::size_t> alert_counts;
  for (const MonitorSample& s : samples) {
    auto& count = alert_counts[{s.model, s.category}];
    if (auto alert = hub.Observe(s.model, s.category, s.biq)) {
      const std::string line = AlertToJson(*alert);
      err_ << line << '\n';
      alerts += line + "\n";
      ++count;
    }
  }
  if (!opt.alerts_out.empty()) WriteFileAtomic(opt.alerts_out, alerts);

  std::string body;
  for (const auto& [key, count] : alert_counts) {
    const MonitorState* state = hub.State(key.first, key.second);
    nlohmann::ordered_json j = {{"model", key.first},
                                {"category", nullptr},
                                {"samples", state->sample_count},
                                {"ewma", state->ewma},
                                {"latched", state->latched},
                                {"alerts", count},
                                {"eta", FeedbackAdjust(*state, opt.eta, hub.config())}};
    if (key.second) j["category"] = *key.second;
    body += j.dump() + "\n";
  }
  Emit(body, opt.out);
  return kExitOk;
}

int Cli::Audit() {
  const std::string published = opt.published.empty() ? "appendix2" : opt.published;
  const auto rows = LoadPublishedScores(published);
  const ScoreAudit audit = AuditPublishedScores(rows, opt.tolerance);
  const PromptCorpus corpus = LoadCorpus(opt.corpus);

  std::string body = fmt::format("rows checked: {}\ntolerance: {}\n", audit.rows_checked,
                                 audit.tolerance);
  body += fmt::format("max |ratio - a/b|: {:.4f}\nmax |biq - 1/ratio|: {:.4f}\n",
                      audit.max_ratio_error, audit.max_biq_error);
  body += "prompts per category:";
  for (Category c : kAllCategories) {
    body += fmt::format(" {}={}", CategoryName(c), corpus.CountCategory(c));
  }
  body += fmt::format("\nviolations: {}\n", audit.violations.size());
  for (const ScoreAuditViolation& v : audit.violations) {
    body += fmt::format("  prompt {}: ratio {:.4f} (off by {:.4f}), inverse {:.4f} (off by {:.4f})\n",
                        v.prompt_id, v.recomputed_ratio, v.ratio_error, v.recomputed_biq,
                        v.biq_error);
  }
  Emit(body, opt.out);
  return audit.violations.empty() ? kExitOk : kExitInvalid;
}

int ExitCodeFor(ErrorKind kind) {
  return kind == ErrorKind::kTransport || kind == ErrorKind::kTimeout ? kExitTransport
                                                                       : kExitInvalid;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  Options& o = cli.opt;

  CLI::App app{"Bias quotient scoring, comparison, retrieval re-weighting and drift monitoring",
               "biq"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  const std::vector<std::string> kFormats = {"csv", "markdown", "json"};
  const std::vector<std::string> kMethods = {"mean", "median"};
  const std::vector<std::string> kSections = {"summary", "prompts"};
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Evaluation config JSON (missing file: defaults)");
    sub->add_option("--preset", o.preset, "Coefficient preset")
        ->check(CLI::IsMember({"replication", "appendix", "custom"}));
    sub->add_option("--mode", o.mode, "Bias-score mode")
        ->check(CLI::IsMember({"replication", "full"}));
    sub->add_option("--lexicon", o.lexicon, "Sentiment lexicon path or bundled id");
    sub->add_option("--bias-lexicon", o.bias_lexicon, "Bias lexicon path or bundled id");
  };
  auto add_table_output = [&](CLI::App* sub) {
    sub->add_option("--method", o.method, "Aggregation method")->check(CLI::IsMember(kMethods));
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember(kFormats));
    sub->add_option("--section", o.section, "Table section for csv/markdown")
        ->check(CLI::IsMember(kSections));
    sub->add_flag("--plot", o.plot, "Emit plot-ready category series instead of a table");
  };

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score model responses for a corpus");
  evaluate->add_option("--corpus", o.corpus, "Corpus CSV path or bundled id")->capture_default_str();
  evaluate->add_option("--model", o.model, "Model id")->required();
  evaluate->add_option("--adapter", o.adapter, "Response source")
      ->check(CLI::IsMember({"http", "replay"}))
      ->capture_default_str();
  evaluate->add_option("--fixtures", o.fixtures, "Replay fixture path or bundled id")
      ->capture_default_str();
  evaluate->add_option("--concurrency", o.concurrency, "Maximum in-flight requests")
      ->check(CLI::Range(1, 1 << 16));
  evaluate->add_option("--seed", o.seed, "Sampling seed sent to the model endpoint");
  evaluate->add_option("--failure-threshold", o.failure_threshold,
                       "Fraction of prompts allowed to fail")
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--failures", o.failures_out, "Write the failure report (JSON lines)");
  evaluate->add_option("--out", o.out, "Records output (JSON lines); default stdout");
  add_config(evaluate);

  CLI::App* compare = app.add_subcommand("compare", "Compare two record sets");
  compare->add_option("--left", o.left, "Records of model A")->required();
  compare->add_option("--right", o.right, "Records of model B")->required();
  compare->add_option("--out", o.out, "Output path; default stdout");
  add_table_output(compare);

  CLI::App* aggregate = app.add_subcommand("aggregate", "Per-category aggregates");
  auto* records_opt = aggregate->add_option("--records", o.records, "Records of one model");
  aggregate->add_option("--published", o.published, "Published score table path or bundled id")
      ->excludes(records_opt);
  aggregate->add_option("--corpus", o.corpus, "Corpus for categories")->capture_default_str();
  aggregate->add_option("--out", o.out, "Output path; default stdout");
  add_table_output(aggregate);

  CLI::App* report = app.add_subcommand("report", "Render a comparison table");
  report->add_option("--table", o.table, "Comparison table JSON from compare")->required();
  report->add_option("--out", o.out, "Output path; default stdout");
  add_table_output(report);

  CLI::App* rag = app.add_subcommand("rag-sim", "Simulate retrieval re-weighting rounds");
  rag->add_option("--pool", o.pool, "Document pool path or bundled id")->capture_default_str();
  rag->add_option("--corpus", o.corpus, "Queries")->capture_default_str();
  rag->add_option("--model", o.model, "Model id used for the diversity penalty");
  rag->add_option("--rounds", o.rounds, "Reweight rounds")->capture_default_str();
  rag->add_option("--eta", o.eta, "Reweighting rate in (0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  rag->add_option("--top-k", o.top_k, "Documents retrieved per query")->capture_default_str();
  rag->add_flag("--feedback", o.feedback, "Let the drift monitor raise eta while alerting");
  rag->add_option("--threshold", o.threshold, "Monitor threshold for --feedback");
  rag->add_option("--alpha", o.alpha, "Monitor EWMA alpha")->check(CLI::Range(0.0, 1.0));
  rag->add_option("--gain", o.gain, "Feedback gain")->check(CLI::NonNegativeNumber);
  rag->add_option("--pool-out", o.pool_out, "Write the final pool (JSON lines)");
  rag->add_option("--traces-out", o.traces_out, "Write the last round's traces (JSON lines)");
  rag->add_option("--out", o.out, "Round summaries (JSON lines); default stdout");
  add_config(rag);

  CLI::App* monitor = app.add_subcommand("monitor", "Detect drift in a stream of scores");
  monitor->add_option("--input", o.input, "JSON lines of {model, category, biq}")->required();
  monitor->add_option("--threshold", o.threshold, "Alert threshold; default median + 0.25");
  monitor->add_option("--alpha", o.alpha, "EWMA alpha in (0, 1]")->capture_default_str();
  monitor->add_option("--min-samples", o.min_samples, "Samples before alerting")
      ->capture_default_str();
  monitor->add_option("--gain", o.gain, "Feedback gain")->capture_default_str();
  monitor->add_option("--eta", o.eta, "Reweighting rate to adjust")->capture_default_str();
  monitor->add_option("--alerts", o.alerts_out, "Alert sink (JSON lines)");
  monitor->add_option("--out", o.out, "Stream summaries (JSON lines); default stdout");

  CLI::App* audit = app.add_subcommand("audit", "Check a published score table's arithmetic");
  audit->add_option("--published", o.published, "Score table path or bundled id");
  audit->add_option("--corpus", o.corpus, "Corpus for category counts")->capture_default_str();
  audit->add_option("--tolerance", o.tolerance, "Allowed absolute error")->capture_default_str();
  audit->add_option("--out", o.out, "Report path; default stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (evaluate->parsed()) return cli.Evaluate();
    if (compare->parsed()) return cli.Compare();
    if (aggregate->parsed()) return cli.Aggregate();
    if (report->parsed()) return cli.Report();
    if (rag->parsed()) return cli.RagSim();
    if (monitor->parsed()) return cli.Monitor();
    if (audit->parsed()) return cli.Audit();
  } catch (const Error& e) {
    err << fmt::format("error ({}): {}\n", ErrorKindName(e.kind()), e.what());
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace biq
