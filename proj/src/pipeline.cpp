#include "biq/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "biq/io.hpp"

namespace biq {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

Error ConfigError(std::string_view path, std::string_view why) {
  return Error(ErrorKind::kConfiguration, fmt::format("{}: {}", path, why));
}

// --- config schema helpers ---------------------------------------------------

void RequireObject(const json& v, std::string_view path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
}

void RejectUnknownKeys(const json& obj, std::string_view path,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(fmt::format("{}.{}", path, key), "unknown key");
    }
  }
}

double Number(const json& v, std::string_view path, double lo, double hi) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < lo || x > hi) {
    throw ConfigError(path, fmt::format("{} is outside [{}, {}]", x, lo, hi));
  }
  return x;
}

double PositiveNumber(const json& v, std::string_view path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x <= 0.0) throw ConfigError(path, fmt::format("{} must be positive", x));
  return x;
}

std::int64_t Integer(const json& v, std::string_view path, std::int64_t lo, std::int64_t hi) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const std::int64_t x = v.get<std::int64_t>();
  if (x < lo || x > hi) throw ConfigError(path, fmt::format("{} is outside [{}, {}]", x, lo, hi));
  return x;
}

std::string String(const json& v, std::string_view path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

bool Boolean(const json& v, std::string_view path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
  return v.get<bool>();
}

void ParseCoefficients(const json& obj, CoefficientOverrides& out) {
  constexpr std::string_view kPath = "$.coefficients";
  RequireObject(obj, kPath);
  RejectUnknownKeys(obj, kPath,
                    {"dimension_weight", "diversity_weight", "lambda", "mu", "theta", "phi"});
  auto take = [&](const char* key, std::optional<double>& slot) {
    if (obj.contains(key)) slot = Number(obj[key], fmt::format("{}.{}", kPath, key), 0.0, 1.0);
  };
  take("dimension_weight", out.dimension_weight);
  take("diversity_weight", out.diversity_weight);
  take("lambda", out.lambda);
  take("mu", out.mu);
  take("theta", out.theta);
  take("phi", out.phi);
}

void ParseGateway(const json& obj, GatewayConfig& g) {
  constexpr std::string_view kPath = "$.gateway";
  RequireObject(obj, kPath);
  RejectUnknownKeys(obj, kPath,
                    {"base_url", "model_name", "auth_env", "max_concurrency", "timeout_ms", "retry",
                     "cache_dir", "temperature", "seed"});
  auto path = [&](std::string_view key) { return fmt::format("{}.{}", kPath, key); };
  if (obj.contains("base_url")) g.base_url = String(obj["base_url"], path("base_url"));
  if (obj.contains("model_name")) g.model_name = String(obj["model_name"], path("model_name"));
  if (obj.contains("auth_env")) g.auth_env = String(obj["auth_env"], path("auth_env"));
  if (obj.contains("max_concurrency")) {
    g.max_concurrency =
        static_cast<int>(Integer(obj["max_concurrency"], path("max_concurrency"), 1, 1 << 16));
  }
  if (obj.contains("timeout_ms")) {
    g.timeout_ms = static_cast<int>(Integer(obj["timeout_ms"], path("timeout_ms"), 1, 3'600'000));
  }
  if (obj.contains("cache_dir")) g.cache_dir = String(obj["cache_dir"], path("cache_dir"));
  if (obj.contains("temperature")) {
    g.temperature = Number(obj["temperature"], path("temperature"), 0.0, 2.0);
  }
  if (obj.contains("seed")) {
    g.seed = Integer(obj["seed"], path("seed"), std::numeric_limits<std::int64_t>::min(),
                     std::numeric_limits<std::int64_t>::max());
  }
  if (obj.contains("retry")) {
    const json& r = obj["retry"];
    const std::string rp = path("retry");
    RequireObject(r, rp);
    RejectUnknownKeys(r, rp, {"max_attempts", "initial_backoff_ms", "multiplier"});
    if (r.contains("max_attempts")) {
      g.retry.max_attempts =
          static_cast<int>(Integer(r["max_attempts"], rp + ".max_attempts", 1, 100));
    }
    if (r.contains("initial_backoff_ms")) {
      g.retry.initial_backoff_ms =
          static_cast<int>(Integer(r["initial_backoff_ms"], rp + ".initial_backoff_ms", 0, 600'000));
    }
    if (r.contains("multiplier")) {
      g.retry.multiplier = Number(r["multiplier"], rp + ".multiplier", 1.0, 100.0);
    }
  }
}

void ParseSentiment(const json& obj, EvalConfig& config) {
  constexpr std::string_view kPath = "$.sentiment";
  RequireObject(obj, kPath);
  RejectUnknownKeys(obj, kPath, {"lexicon", "negation_factor", "negation_window"});
  if (obj.contains("lexicon")) config.sentiment_lexicon = String(obj["lexicon"], "$.sentiment.lexicon");
  if (obj.contains("negation_factor")) {
    config.sentiment.negation_factor =
        Number(obj["negation_factor"], "$.sentiment.negation_factor", -1.0, 1.0);
  }
  if (obj.contains("negation_window")) {
    config.sentiment.negation_window =
        static_cast<int>(Integer(obj["negation_window"], "$.sentiment.negation_window", 0, 64));
  }
}

// --- record JSON ---------------------------------------------------------------

ojson FactorsToJson(const FactorVector& f) {
  return ojson{{"bias_scores", f.bias_scores},
               {"dimension_weights", f.dimension_weights},
               {"diversity_penalty", f.diversity_penalty},
               {"diversity_weight", f.diversity_weight},
               {"sentiment_bias", f.sentiment_bias},
               {"lambda", f.lambda},
               {"context_sensitivity", f.context_sensitivity},
               {"mu", f.mu},
               {"mitigation", f.mitigation},
               {"theta", f.theta},
               {"adaptability", f.adaptability},
               {"phi", f.phi}};
}

FactorVector FactorsFromJson(const json& j) {
  FactorVector f;
  f.bias_scores = j.at("bias_scores").get<std::vector<double>>();
  f.dimension_weights = j.at("dimension_weights").get<std::vector<double>>();
  f.diversity_penalty = j.at("diversity_penalty").get<double>();
  f.diversity_weight = j.at("diversity_weight").get<double>();
  f.sentiment_bias = j.at("sentiment_bias").get<double>();
  f.lambda = j.at("lambda").get<double>();
  f.context_sensitivity = j.at("context_sensitivity").get<double>();
  f.mu = j.at("mu").get<double>();
  f.mitigation = j.at("mitigation").get<double>();
  f.theta = j.at("theta").get<double>();
  f.adaptability = j.at("adaptability").get<double>();
  f.phi = j.at("phi").get<double>();
  return f;
}

Category CategoryFromName(const std::string& name) {
  const auto c = ParseCategory(name);
  if (!c) throw Error(ErrorKind::kParse, fmt::format("unknown category '{}'", name));
  return *c;
}

std::string DescribeIds(const std::vector<int>& ids) {
  constexpr std::size_t kShown = 10;
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(ids[i]);
  }
  if (ids.size() > kShown) out += fmt::format(" and {} more", ids.size() - kShown);
  return out;
}

}  // namespace

std::string_view EvalModeName(EvalMode mode) {
  return mode == EvalMode::kFull ? "full" : "replication";
}

EvalMode ParseEvalMode(std::string_view name) {
  if (name == "replication") return EvalMode::kReplication;
  if (name == "full") return EvalMode::kFull;
  throw Error(ErrorKind::kConfiguration, fmt::format("unknown mode '{}'", name));
}

Coefficients EvalConfig::ResolvedCoefficients() const {
  Coefficients c = PresetCoefficients(preset);
  if (coefficients.dimension_weight) c.dimension_weight = *coefficients.dimension_weight;
  if (coefficients.diversity_weight) c.diversity_weight = *coefficients.diversity_weight;
  if (coefficients.lambda) c.lambda = *coefficients.lambda;
  if (coefficients.mu) c.mu = *coefficients.mu;
  if (coefficients.theta) c.theta = *coefficients.theta;
  if (coefficients.phi) c.phi = *coefficients.phi;
  return c;
}

void EvalConfig::Validate() const {
  auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  for (const auto& [model, penalty] : diversity_penalty) {
    if (model.empty()) throw ConfigError("$.diversity_penalty", "model id must be non-empty");
    if (!in_unit(penalty)) {
      throw ConfigError(fmt::format("$.diversity_penalty.{}", model), "must be in [0, 1]");
    }
  }
  if (!(std::isfinite(base_context_sensitivity) && base_context_sensitivity >= 0.0)) {
    throw ConfigError("$.base_context_sensitivity", "must be a non-negative number");
  }
  for (const auto& [category, multiplier] : category_adjustments) {
    if (!(std::isfinite(multiplier) && multiplier > 0.0)) {
      throw ConfigError(fmt::format("$.category_adjustments.{}", CategoryName(category)),
                        "must be positive");
    }
  }
  if (!in_unit(mitigation_default)) throw ConfigError("$.mitigation_default", "must be in [0, 1]");
  if (!in_unit(adaptability_default)) {
    throw ConfigError("$.adaptability_default", "must be in [0, 1]");
  }
  const Coefficients c = ResolvedCoefficients();
  for (double v : {c.dimension_weight, c.diversity_weight, c.lambda, c.mu, c.theta, c.phi}) {
    if (!in_unit(v)) throw ConfigError("$.coefficients", "every coefficient must be in [0, 1]");
  }
  if (!in_unit(failure_threshold)) throw ConfigError("$.failure_threshold", "must be in [0, 1]");
  if (context_window < 1) throw ConfigError("$.context_window", "must be at least 1");
  if (sentiment.negation_window < 0) {
    throw ConfigError("$.sentiment.negation_window", "must be non-negative");
  }
  gateway.Validate();
}

std::string CanonicalConfigJson(const EvalConfig& config) {
  const Coefficients c = config.ResolvedCoefficients();
  ojson adjustments = ojson::object();
  for (Category category : kAllCategories) {
    const auto it = config.category_adjustments.find(category);
    adjustments[std::string(CategoryName(category))] =
        it == config.category_adjustments.end() ? 1.0 : it->second;
  }
  ojson penalties = ojson::object();
  for (const auto& [model, penalty] : config.diversity_penalty) penalties[model] = penalty;
  const ojson j = {
      {"mode", EvalModeName(config.mode)},
      {"preset", PresetName(config.preset)},
      {"coefficients",
       {{"dimension_weight", c.dimension_weight},
        {"diversity_weight", c.diversity_weight},
        {"lambda", c.lambda},
        {"mu", c.mu},
        {"theta", c.theta},
        {"phi", c.phi}}},
      {"diversity_penalty", penalties},
      {"base_context_sensitivity", config.base_context_sensitivity},
      {"category_adjustments", adjustments},
      {"mitigation_default", config.mitigation_default},
      {"adaptability_default", config.adaptability_default},
      {"strict_ranges", config.range_check == RangeCheck::kStrict},
      {"context_window", config.context_window},
      {"sentiment",
       {{"lexicon", config.sentiment_lexicon},
        {"negation_factor", config.sentiment.negation_factor},
        {"negation_window", config.sentiment.negation_window}}},
      {"bias_lexicon", config.bias_lexicon},
  };
  return j.dump();
}

std::string ConfigHash(const EvalConfig& config) {
  return Sha256Hex(CanonicalConfigJson(config)).substr(0, 16);
}

EvalConfig ParseConfig(std::string_view json_text, std::string_view origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfiguration, fmt::format("{}: invalid JSON: {}", origin, e.what()));
  }
  EvalConfig config;
  try {
    RequireObject(root, "$");
    RejectUnknownKeys(root, "$",
                      {"$schema", "mode", "preset", "diversity_penalty", "base_context_sensitivity",
                       "category_adjustments", "mitigation_default", "adaptability_default",
                       "coefficients", "failure_threshold", "strict_ranges", "context_window",
                       "sentiment", "bias_lexicon", "gateway"});
    if (root.contains("mode")) config.mode = ParseEvalMode(String(root["mode"], "$.mode"));
    if (root.contains("preset")) config.preset = ParsePreset(String(root["preset"], "$.preset"));
    if (root.contains("diversity_penalty")) {
      const json& obj = root["diversity_penalty"];
      RequireObject(obj, "$.diversity_penalty");
      config.diversity_penalty.clear();
      for (const auto& [model, value] : obj.items()) {
        config.diversity_penalty[model] =
            Number(value, fmt::format("$.diversity_penalty.{}", model), 0.0, 1.0);
      }
    }
    if (root.contains("base_context_sensitivity")) {
      config.base_context_sensitivity =
          Number(root["base_context_sensitivity"], "$.base_context_sensitivity", 0.0, 1.0);
    }
    if (root.contains("category_adjustments")) {
      const json& obj = root["category_adjustments"];
      RequireObject(obj, "$.category_adjustments");
      for (const auto& [label, value] : obj.items()) {
        const std::string path = fmt::format("$.category_adjustments.{}", label);
        const auto category = ParseCategory(label);
        if (!category) throw ConfigError(path, "unknown category");
        config.category_adjustments[*category] = PositiveNumber(value, path);
      }
    }
    if (root.contains("mitigation_default")) {
      config.mitigation_default = Number(root["mitigation_default"], "$.mitigation_default", 0, 1);
    }
    if (root.contains("adaptability_default")) {
      config.adaptability_default =
          Number(root["adaptability_default"], "$.adaptability_default", 0, 1);
    }
    if (root.contains("coefficients")) ParseCoefficients(root["coefficients"], config.coefficients);
    if (root.contains("failure_threshold")) {
      config.failure_threshold = Number(root["failure_threshold"], "$.failure_threshold", 0, 1);
    }
    if (root.contains("strict_ranges")) {
      config.range_check = Boolean(root["strict_ranges"], "$.strict_ranges") ? RangeCheck::kStrict
                                                                               : RangeCheck::kLenient;
    }
    if (root.contains("context_window")) {
      config.context_window =
          static_cast<std::size_t>(Integer(root["context_window"], "$.context_window", 1, 1000));
    }
    if (root.contains("sentiment")) ParseSentiment(root["sentiment"], config);
    if (root.contains("bias_lexicon")) {
      config.bias_lexicon = String(root["bias_lexicon"], "$.bias_lexicon");
    }
    if (root.contains("gateway")) ParseGateway(root["gateway"], config.gateway);
    config.Validate();
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", origin, e.what()));
  }
  return config;
}

EvalConfig LoadConfig(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return EvalConfig{};
  return ParseConfig(ReadFile(path), path.string());
}

double ContextSensitivityFor(Category category, const EvalConfig& config) {
  const auto it = config.category_adjustments.find(category);
  const double multiplier = it == config.category_adjustments.end() ? 1.0 : it->second;
  return std::clamp(config.base_context_sensitivity * multiplier, 0.0, 1.0);
}

// --- Evaluator -------------------------------------------------------------------

Evaluator::Evaluator(EvalConfig config, SentimentLexicon sentiment, std::optional<BiasLexicon> bias)
    : config_(std::move(config)), sentiment_(std::move(sentiment)), bias_(std::move(bias)) {
  config_.Validate();
  if (config_.mode == EvalMode::kFull && !bias_) {
    throw Error(ErrorKind::kConfiguration, "full mode needs a bias lexicon");
  }
  coefficients_ = config_.ResolvedCoefficients();
  config_hash_ = ConfigHash(config_);
}

Evaluator Evaluator::FromConfig(EvalConfig config) {
  SentimentLexicon sentiment = SentimentLexicon::Resolve(config.sentiment_lexicon);
  std::optional<BiasLexicon> bias;
  if (config.mode == EvalMode::kFull) bias = BiasLexicon::Resolve(config.bias_lexicon);
  return Evaluator(std::move(config), std::move(sentiment), std::move(bias));
}

EvaluationRecord Evaluator::Evaluate(const Prompt& prompt, const ModelResponse& response) const {
  if (response.prompt_id != prompt.id) {
    throw Error(ErrorKind::kEvaluation, fmt::format("response for prompt {} paired with prompt {}",
                                                    response.prompt_id, prompt.id));
  }
  const auto penalty = config_.diversity_penalty.find(response.model_id);
  if (penalty == config_.diversity_penalty.end()) {
    throw Error(ErrorKind::kConfiguration,
                fmt::format("no diversity_penalty configured for model '{}'", response.model_id));
  }

  const SentimentScore sentiment = ScoreSentiment(response.text, sentiment_, config_.sentiment);
  const double s = SentimentBias(sentiment);

  FactorVector f;
  if (config_.mode == EvalMode::kReplication) {
    f.bias_scores = {s};
    f.dimension_weights = {1.0};
  } else {
    const auto mentions = ExtractMentions(response.text, *bias_, sentiment_, config_.context_window);
    const DisparityStats stats = GroupDisparity(mentions, *bias_);
    for (const DimensionStats& d : stats.dimensions) {
      f.bias_scores.push_back(IntegrateBiasScore(d.polarity_spread, d.positive_share_spread));
      f.dimension_weights.push_back(coefficients_.dimension_weight);
    }
  }
  f.diversity_penalty = penalty->second;
  f.diversity_weight = coefficients_.diversity_weight;
  f.sentiment_bias = s;
  f.lambda = coefficients_.lambda;
  f.context_sensitivity = ContextSensitivityFor(prompt.category, config_);
  f.mu = coefficients_.mu;
  f.mitigation = config_.mitigation_default;
  f.theta = coefficients_.theta;
  f.adaptability = config_.adaptability_default;
  f.phi = coefficients_.phi;

  const BiqScore score = ComputeBiq(f, config_.range_check);
  return EvaluationRecord{.prompt_id = prompt.id,
                          .model_id = response.model_id,
                          .category = prompt.category,
                          .response_text = response.text,
                          .source = response.source,
                          .sentiment = sentiment,
                          .factors = std::move(f),
                          .biq = score.value,
                          .config_hash = config_hash_};
}

// --- RunEvaluation ---------------------------------------------------------------

double EvaluationRun::FailureFraction() const {
  return attempted == 0 ? 0.0
                        : static_cast<double>(failures.size()) / static_cast<double>(attempted);
}

bool EvaluationRun::ExceedsThreshold(double threshold) const {
  return FailureFraction() > threshold;
}

EvaluationRun RunEvaluation(const PromptCorpus& corpus, ModelGateway& gateway,
                            const Evaluator& evaluator, const RunOptions& options) {
  EvaluationRun run;
  const std::size_t n = corpus.prompts.size();
  run.attempted = n;
  if (n == 0) {
    run.warnings.push_back(fmt::format("corpus '{}' has no prompts", corpus.name));
    return run;
  }

  // One slot per prompt; completion order never reaches the output.
  std::vector<std::optional<EvaluationRecord>> records(n);
  std::vector<std::optional<PromptFailure>> failures(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      const Prompt& prompt = corpus.prompts[i];
      try {
        records[i] = evaluator.Evaluate(prompt, gateway.Generate(prompt));
      } catch (const Error& e) {
        failures[i] = PromptFailure{prompt.id, e.kind(), e.what()};
      } catch (const std::exception& e) {
        failures[i] = PromptFailure{prompt.id, ErrorKind::kEvaluation, e.what()};
      }
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, options.concurrency)), 1, n);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (records[i]) run.records.push_back(std::move(*records[i]));
    if (failures[i]) run.failures.push_back(std::move(*failures[i]));
  }
  return run;
}

// --- record I/O ------------------------------------------------------------------

std::string RecordToJson(const EvaluationRecord& r) {
  const ojson j = {{"prompt_id", r.prompt_id},
                   {"model", r.model_id},
                   {"category", CategoryName(r.category)},
                   {"response_text", r.response_text},
                   {"source", ResponseSourceName(r.source)},
                   {"sentiment",
                    {{"polarity", r.sentiment.polarity},
                     {"subjectivity", r.sentiment.subjectivity},
                     {"token_count", r.sentiment.token_count},
                     {"matched_count", r.sentiment.matched_count}}},
                   {"factors", FactorsToJson(r.factors)},
                   {"biq", r.biq},
                   {"config_hash", r.config_hash}};
  return j.dump();
}

EvaluationRecord RecordFromJson(std::string_view line) {
  try {
    const json j = json::parse(line);
    EvaluationRecord r;
    r.prompt_id = j.at("prompt_id").get<int>();
    r.model_id = j.at("model").get<std::string>();
    r.category = CategoryFromName(j.at("category").get<std::string>());
    r.response_text = j.at("response_text").get<std::string>();
    r.source = ParseResponseSource(j.at("source").get<std::string>());
    const json& s = j.at("sentiment");
    r.sentiment.polarity = s.at("polarity").get<double>();
    r.sentiment.subjectivity = s.at("subjectivity").get<double>();
    r.sentiment.token_count = s.at("token_count").get<std::size_t>();
    r.sentiment.matched_count = s.at("matched_count").get<std::size_t>();
    r.factors = FactorsFromJson(j.at("factors"));
    r.biq = j.at("biq").get<double>();
    r.config_hash = j.at("config_hash").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("bad evaluation record: {}", e.what()));
  }
}

std::string WriteRecords(std::span<const EvaluationRecord> records) {
  std::string out;
  for (const EvaluationRecord& r : records) {
    out += RecordToJson(r);
    out.push_back('\n');
  }
  return out;
}

std::vector<EvaluationRecord> ParseRecords(std::string_view content, std::string_view origin) {
  std::vector<EvaluationRecord> records;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      records.push_back(RecordFromJson(line));
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
  return records;
}

std::vector<EvaluationRecord> LoadRecords(const std::filesystem::path& path) {
  return ParseRecords(ReadFile(path), path.string());
}

std::vector<RecordMismatch> VerifyRecords(std::span<const EvaluationRecord> records,
                                          RangeCheck check) {
  std::vector<RecordMismatch> mismatches;
  for (const EvaluationRecord& r : records) {
    double recomputed = std::nan("");
    try {
      recomputed = ComputeBiq(r.factors, check).value;
    } catch (const Error&) {
      // Invalid factors cannot reproduce any stored value.
    }
    if (!(recomputed == r.biq)) {
      mismatches.push_back({r.prompt_id, r.model_id, r.biq, recomputed});
    }
  }
  return mismatches;
}

// --- comparison ------------------------------------------------------------------

ComparisonTable CompareScores(std::span<const PromptScore> a, std::span<const PromptScore> b,
                              std::string model_a, std::string model_b, AggregateMethod method) {
  auto index = [](std::span<const PromptScore> side, std::string_view label) {
    std::map<int, PromptScore> by_id;
    for (const PromptScore& s : side) {
      if (!by_id.emplace(s.prompt_id, s).second) {
        throw Error(ErrorKind::kComparison,
                    fmt::format("prompt {} appears twice in {}", s.prompt_id, label));
      }
    }
    return by_id;
  };
  const auto left = index(a, model_a);
  const auto right = index(b, model_b);

  std::vector<int> only_left, only_right, category_mismatch;
  for (const auto& [id, s] : left) {
    const auto it = right.find(id);
    if (it == right.end()) {
      only_left.push_back(id);
    } else if (it->second.category != s.category) {
      category_mismatch.push_back(id);
    }
  }
  for (const auto& [id, s] : right) {
    if (!left.contains(id)) only_right.push_back(id);
  }
  if (!only_left.empty() || !only_right.empty() || !category_mismatch.empty()) {
    std::string why = "prompt id sets differ:";
    if (!only_left.empty()) why += fmt::format(" only in {}: [{}];", model_a, DescribeIds(only_left));
    if (!only_right.empty()) {
      why += fmt::format(" only in {}: [{}];", model_b, DescribeIds(only_right));
    }
    if (!category_mismatch.empty()) {
      why += fmt::format(" category differs: [{}];", DescribeIds(category_mismatch));
    }
    why.pop_back();
    throw Error(ErrorKind::kComparison, why);
  }

  ComparisonTable table{std::move(model_a), std::move(model_b), method, {}, {}};
  std::map<Category, std::pair<std::vector<double>, std::vector<double>>> by_category;
  for (const auto& [id, s] : left) {
    const PromptScore& r = right.at(id);
    const double ratio = BiasCoefficient(s.score, r.score);
    table.rows.push_back({id, s.category, s.score, r.score, ratio, InverseBiq(ratio)});
    by_category[s.category].first.push_back(s.score);
    by_category[s.category].second.push_back(r.score);
  }
  for (Category category : kAllCategories) {
    const auto it = by_category.find(category);
    if (it == by_category.end()) continue;
    const auto& [values_a, values_b] = it->second;
    const double agg_a = AggregateScores(values_a, method).value;
    const double agg_b = AggregateScores(values_b, method).value;
    const double ratio = BiasCoefficient(agg_a, agg_b);
    table.categories.push_back(
        {category, values_a.size(), agg_a, agg_b, ratio, InverseBiq(ratio)});
  }
  return table;
}

ComparisonTable CompareModels(std::span<const EvaluationRecord> a,
                              std::span<const EvaluationRecord> b, AggregateMethod method) {
  auto side = [](std::span<const EvaluationRecord> records, std::string_view label) {
    std::set<std::string> models;
    std::vector<PromptScore> scores;
    for (const EvaluationRecord& r : records) {
      models.insert(r.model_id);
      scores.push_back({r.prompt_id, r.category, r.biq});
    }
    if (models.size() > 1) {
      throw Error(ErrorKind::kComparison,
                  fmt::format("{} record set mixes models: {}", label, fmt::join(models, ", ")));
    }
    return std::pair{models.empty() ? std::string(label) : *models.begin(), std::move(scores)};
  };
  auto [model_a, scores_a] = side(a, "left");
  auto [model_b, scores_b] = side(b, "right");
  return CompareScores(scores_a, scores_b, std::move(model_a), std::move(model_b), method);
}

ComparisonTable ComparePublished(const PromptCorpus& corpus,
                                 std::span<const PublishedScoreRow> rows, AggregateMethod method) {
  std::vector<PromptScore> a, b;
  for (const PublishedScoreRow& row : rows) {
    const Prompt* prompt = corpus.Find(row.prompt_id);
    if (prompt == nullptr) {
      throw Error(ErrorKind::kComparison,
                  fmt::format("score row {} has no prompt in corpus '{}'", row.prompt_id,
                              corpus.name));
    }
    a.push_back({row.prompt_id, prompt->category, row.latimer});
    b.push_back({row.prompt_id, prompt->category, row.gpt});
  }
  return CompareScores(a, b, "latimer", "gpt35", method);
}

}  // namespace biq
