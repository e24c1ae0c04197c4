#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biq/bias_lexicon.hpp"
#include "biq/corpus.hpp"
#include "biq/error.hpp"
#include "biq/gateway.hpp"
#include "biq/metric.hpp"
#include "biq/sentiment.hpp"

namespace biq {

enum class EvalMode { kReplication, kFull };

std::string_view EvalModeName(EvalMode mode);
EvalMode ParseEvalMode(std::string_view name);

struct CoefficientOverrides {
  std::optional<double> dimension_weight;
  std::optional<double> diversity_weight;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<double> theta;
  std::optional<double> phi;
};

struct EvalConfig {
  EvalMode mode = EvalMode::kReplication;
  Preset preset = Preset::kReplication;
  std::map<std::string, double> diversity_penalty = {{"gpt35", 0.2}, {"latimer", 0.3}};
  double base_context_sensitivity = 0.5;
  // Categories absent from the map use multiplier 1.0.
  std::map<Category, double> category_adjustments = {{Category::kRace, 1.10},
                                                     {Category::kSocialClass, 1.05}};
  double mitigation_default = 0.0;
  double adaptability_default = 0.0;
  CoefficientOverrides coefficients;
  double failure_threshold = 0.10;  // fraction of prompts allowed to fail
  RangeCheck range_check = RangeCheck::kStrict;
  std::size_t context_window = kDefaultContextWindow;
  std::string sentiment_lexicon = "default";
  SentimentOptions sentiment;
  std::string bias_lexicon = "default";
  GatewayConfig gateway;

  /// Preset coefficients with overrides applied; kCustom starts from all-ones.
  Coefficients ResolvedCoefficients() const;
  /// Throws kConfiguration.
  void Validate() const;
};

/// Stable JSON form of every field that affects scoring; gateway settings excluded.
std::string CanonicalConfigJson(const EvalConfig& config);
/// First 16 hex digits of SHA-256 over CanonicalConfigJson.
std::string ConfigHash(const EvalConfig& config);

/// Throws kConfiguration naming the JSON path of the offending value.
/// Unknown keys are rejected.
EvalConfig ParseConfig(std::string_view json_text, std::string_view origin = "<memory>");
/// A path that does not exist yields the built-in defaults.
EvalConfig LoadConfig(const std::filesystem::path& path);

double ContextSensitivityFor(Category category, const EvalConfig& config);

struct EvaluationRecord {
  int prompt_id = 0;
  std::string model_id;
  Category category = Category::kGender;
  std::string response_text;
  ResponseSource source = ResponseSource::kReplay;
  SentimentScore sentiment;
  FactorVector factors;
  double biq = 0.0;
  std::string config_hash;

  friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

/// Scores responses under one configuration. Immutable after construction,
/// so a single instance may be shared across threads.
class Evaluator {
 public:
  /// `bias` is required in full mode.
  Evaluator(EvalConfig config, SentimentLexicon sentiment, std::optional<BiasLexicon> bias);
  /// Loads the lexicons named by the config.
  static Evaluator FromConfig(EvalConfig config);

  /// Throws kConfiguration when the model has no diversity penalty.
  EvaluationRecord Evaluate(const Prompt& prompt, const ModelResponse& response) const;

  const EvalConfig& config() const { return config_; }
  const std::string& config_hash() const { return config_hash_; }
  const SentimentLexicon& sentiment_lexicon() const { return sentiment_; }

 private:
  EvalConfig config_;
  Coefficients coefficients_;
  SentimentLexicon sentiment_;
  std::optional<BiasLexicon> bias_;
  std::string config_hash_;
};

struct PromptFailure {
  int prompt_id = 0;
  ErrorKind kind = ErrorKind::kEvaluation;
  std::string message;
};

struct EvaluationRun {
  std::vector<EvaluationRecord> records;  // ascending prompt id
  std::vector<PromptFailure> failures;    // ascending prompt id
  std::vector<std::string> warnings;
  std::size_t attempted = 0;

  double FailureFraction() const;
  /// True when more than `threshold` of the attempted prompts failed.
  bool ExceedsThreshold(double threshold) const;
};

struct RunOptions {
  int concurrency = 1;
};

/// Per-prompt errors land in `failures`; only programming errors escape.
EvaluationRun RunEvaluation(const PromptCorpus& corpus, ModelGateway& gateway,
                            const Evaluator& evaluator, const RunOptions& options = {});

std::string RecordToJson(const EvaluationRecord& record);
EvaluationRecord RecordFromJson(std::string_view line);
std::string WriteRecords(std::span<const EvaluationRecord> records);
/// Throws kParse with "origin:line" on a malformed record.
std::vector<EvaluationRecord> ParseRecords(std::string_view content,
                                           std::string_view origin = "<memory>");
std::vector<EvaluationRecord> LoadRecords(const std::filesystem::path& path);

struct RecordMismatch {
  int prompt_id = 0;
  std::string model_id;
  double stored = 0.0;
  double recomputed = 0.0;
};

/// Records whose stored biq differs from ComputeBiq(factors) in any bit.
std::vector<RecordMismatch> VerifyRecords(std::span<const EvaluationRecord> records,
                                          RangeCheck check = RangeCheck::kStrict);

struct PromptScore {
  int prompt_id = 0;
  Category category = Category::kGender;
  double score = 0.0;
};

struct ComparisonRow {
  int prompt_id = 0;
  Category category = Category::kGender;
  double score_a = 0.0;
  double score_b = 0.0;
  double ratio = 0.0;    // score_a / score_b
  double inverse = 0.0;  // 1 / ratio

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct CategoryRow {
  Category category = Category::kGender;
  std::size_t count = 0;
  double score_a = 0.0;  // aggregate of model A's per-prompt scores
  double score_b = 0.0;
  double ratio = 0.0;    // score_a / score_b, never a mean of per-prompt ratios
  double inverse = 0.0;

  friend bool operator==(const CategoryRow&, const CategoryRow&) = default;
};

struct ComparisonTable {
  std::string model_a;
  std::string model_b;
  AggregateMethod method = AggregateMethod::kMean;
  std::vector<ComparisonRow> rows;         // ascending prompt id
  std::vector<CategoryRow> categories;     // canonical category order, empty categories omitted

  friend bool operator==(const ComparisonTable&, const ComparisonTable&) = default;
};

/// Throws kComparison listing ids present on one side only, or ids whose
/// categories disagree.
ComparisonTable CompareScores(std::span<const PromptScore> a, std::span<const PromptScore> b,
                              std::string model_a, std::string model_b, AggregateMethod method);
ComparisonTable CompareModels(std::span<const EvaluationRecord> a,
                              std::span<const EvaluationRecord> b, AggregateMethod method);
/// Both columns of a published score table, categorised through `corpus`.
ComparisonTable ComparePublished(const PromptCorpus& corpus,
                                 std::span<const PublishedScoreRow> rows, AggregateMethod method);

}  // namespace biq
