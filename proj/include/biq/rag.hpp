#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biq/corpus.hpp"
#include "biq/pipeline.hpp"

namespace biq {

struct WeightedDocument {
  std::string doc_id;
  std::string source;
  std::string topic;
  std::string text;
  double weight = 1.0;

  friend bool operator==(const WeightedDocument&, const WeightedDocument&) = default;
};

inline constexpr double kDefaultWeightFloor = 0.01;

/// Documents keyed by unique id, every weight in [weight_floor, 1].
class DocumentPool {
 public:
  /// Throws kInvalidInput on a duplicate id, an out-of-range weight or a
  /// floor outside (0, 1].
  explicit DocumentPool(std::vector<WeightedDocument> documents,
                        double weight_floor = kDefaultWeightFloor);

  /// JSON lines of {doc_id, source, topic, text, weight}; weight defaults to 1.
  static DocumentPool Parse(std::string_view content, std::string_view origin = "<memory>",
                            double weight_floor = kDefaultWeightFloor);
  /// A readable file path, or the bundled id "demo".
  static DocumentPool Resolve(std::string_view path_or_id,
                              double weight_floor = kDefaultWeightFloor);
  std::string ToJsonLines() const;

  const std::vector<WeightedDocument>& documents() const { return documents_; }
  const WeightedDocument* Find(std::string_view doc_id) const;
  double weight_floor() const { return weight_floor_; }

 private:
  std::vector<WeightedDocument> documents_;  // ascending doc_id
  double weight_floor_;
};

struct RetrievalTrace {
  int query_id = 0;  // prompt id of the evaluation this retrieval fed
  std::string group;
  std::vector<std::string> doc_ids;  // retrieval order

  friend bool operator==(const RetrievalTrace&, const RetrievalTrace&) = default;
};

std::string TracesToJsonLines(std::span<const RetrievalTrace> traces);
std::vector<RetrievalTrace> ParseTraces(std::string_view content,
                                        std::string_view origin = "<memory>");

enum class DiversityKey { kSource, kTopic };

/// Shannon entropy of the counts divided by ln(k), k = number of nonzero
/// counts; 0 when k <= 1. Throws kInvalidInput when every count is zero.
double NormalizedEntropy(std::span<const std::size_t> counts);

/// Normalized entropy of the key over every retrieved document.
/// Throws kInvalidInput for empty traces or ids missing from the pool.
double RetrievalDiversity(std::span<const RetrievalTrace> traces, const DocumentPool& pool,
                          DiversityKey key);

struct BiasContribution {
  std::string doc_id;
  double contribution = 0.0;  // [0, 1]
  std::size_t support = 0;    // records whose retrieval included the document

  friend bool operator==(const BiasContribution&, const BiasContribution&) = default;
};

/// Median biq of the records; throws kEmptyAggregate when there are none.
double BaselineBiq(std::span<const EvaluationRecord> records);

/// One entry per pool document, ascending doc_id:
/// clamp01(mean over participating records of max(0, biq - baseline)).
/// Throws kAttribution when a record has no trace or a trace names an
/// unknown document.
std::vector<BiasContribution> AttributeBias(std::span<const EvaluationRecord> records,
                                            std::span<const RetrievalTrace> traces,
                                            const DocumentPool& pool, double baseline_biq);

/// weight' = max(floor, weight * (1 - eta * contribution)).
/// Throws kInvalidInput for eta outside (0, 1] or an unknown doc id.
DocumentPool Reweight(const DocumentPool& pool, std::span<const BiasContribution> contributions,
                      double eta);

struct RetrievedDocument {
  std::string doc_id;
  double score = 0.0;  // overlapping content terms times weight
};

/// Top-k documents by score, ties broken by doc_id; zero scores are dropped.
std::vector<RetrievedDocument> Retrieve(const DocumentPool& pool, std::string_view query,
                                        std::size_t k);

struct SimulationOptions {
  std::size_t rounds = 10;
  double eta = 0.3;
  std::size_t top_k = 3;
  std::string model_id = "latimer";
  double baseline_biq = -1.0;  // negative: median of the first round
  // Called after each round with (round mean biq, current eta); returns the
  // eta for the next round. Unset keeps eta fixed.
  std::function<double(double, double)> adjust_eta;
};

struct SimulationRound {
  std::size_t round = 0;
  double eta = 0.0;
  double mean_biq = 0.0;
  double source_diversity = 0.0;
  double topic_diversity = 0.0;
  std::vector<RetrievalTrace> traces;
  std::vector<BiasContribution> contributions;
  std::vector<WeightedDocument> weights_after;
};

/// Each round retrieves documents for every prompt, scores the concatenated
/// retrieved text as the response, attributes excess biq and reweights.
std::vector<SimulationRound> SimulateReweighting(DocumentPool pool, const PromptCorpus& corpus,
                                                 const Evaluator& evaluator,
                                                 const SimulationOptions& options);

}  // namespace biq
