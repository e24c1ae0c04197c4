#include "biq/rag.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "biq/data.hpp"
#include "biq/error.hpp"
#include "biq/gateway.hpp"
#include "biq/io.hpp"
#include "biq/metric.hpp"
#include "biq/text.hpp"

namespace biq {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::unordered_set<std::string_view>& Stopwords() {
  static const std::unordered_set<std::string_view> kWords = {
      "a",     "an",   "and",   "are",  "as",    "at",   "be",   "been", "but",   "by",
      "can",   "do",   "does",  "for",  "from",  "has",  "have", "how",  "in",    "into",
      "is",    "it",   "its",   "of",   "on",    "or",   "than", "that", "the",   "their",
      "there", "they", "this",  "to",   "was",   "what", "when", "where", "which", "who",
      "why",   "will", "with",  "would", "you",  "your", "we",   "our",  "these", "those",
      "about", "more", "most",  "some", "such",  "not",  "no",   "all",  "any",   "each"};
  return kWords;
}

std::set<std::string> ContentTerms(std::string_view text) {
  std::set<std::string> terms;
  for (std::string& w : text::Words(text)) {
    if (!Stopwords().contains(w)) terms.insert(std::move(w));
  }
  return terms;
}

double SortedSum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

}  // namespace

DocumentPool::DocumentPool(std::vector<WeightedDocument> documents, double weight_floor)
    : documents_(std::move(documents)), weight_floor_(weight_floor) {
  if (!(weight_floor_ > 0.0 && weight_floor_ <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("weight floor {} outside (0, 1]", weight_floor_));
  }
  std::sort(documents_.begin(), documents_.end(),
            [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const WeightedDocument& d = documents_[i];
    if (d.doc_id.empty()) throw Error(ErrorKind::kInvalidInput, "document with empty doc_id");
    if (i > 0 && documents_[i - 1].doc_id == d.doc_id) {
      throw Error(ErrorKind::kInvalidInput, fmt::format("duplicate doc_id '{}'", d.doc_id));
    }
    if (!(d.weight >= weight_floor_ && d.weight <= 1.0)) {
      throw Error(ErrorKind::kInvalidInput,
                  fmt::format("document '{}' weight {} outside [{}, 1]", d.doc_id, d.weight,
                              weight_floor_));
    }
  }
}

DocumentPool DocumentPool::Parse(std::string_view content, std::string_view origin,
                                 double weight_floor) {
  std::vector<WeightedDocument> documents;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      documents.push_back({j.at("doc_id").get<std::string>(), j.at("source").get<std::string>(),
                           j.at("topic").get<std::string>(), j.at("text").get<std::string>(),
                           j.value("weight", 1.0)});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
  try {
    return DocumentPool(std::move(documents), weight_floor);
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", origin, e.what()));
  }
}

DocumentPool DocumentPool::Resolve(std::string_view path_or_id, double weight_floor) {
  const auto path = ResolveInput(BundleKind::kPool, path_or_id);
  return Parse(ReadFile(path), path.string(), weight_floor);
}

std::string DocumentPool::ToJsonLines() const {
  std::string out;
  for (const WeightedDocument& d : documents_) {
    out += ojson{{"doc_id", d.doc_id},
                 {"source", d.source},
                 {"topic", d.topic},
                 {"text", d.text},
                 {"weight", d.weight}}
               .dump();
    out.push_back('\n');
  }
  return out;
}

const WeightedDocument* DocumentPool::Find(std::string_view doc_id) const {
  auto it = std::lower_bound(documents_.begin(), documents_.end(), doc_id,
                             [](const WeightedDocument& d, std::string_view id) {
                               return d.doc_id < id;
                             });
  return it != documents_.end() && it->doc_id == doc_id ? &*it : nullptr;
}

std::string TracesToJsonLines(std::span<const RetrievalTrace> traces) {
  std::string out;
  for (const RetrievalTrace& t : traces) {
    out += ojson{{"query_id", t.query_id}, {"group", t.group}, {"doc_ids", t.doc_ids}}.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<RetrievalTrace> ParseTraces(std::string_view content, std::string_view origin) {
  std::vector<RetrievalTrace> traces;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      traces.push_back({j.at("query_id").get<int>(), j.value("group", std::string{}),
                        j.at("doc_ids").get<std::vector<std::string>>()});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
  return traces;
}

double NormalizedEntropy(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  std::size_t k = 0;
  for (std::size_t c : counts) {
    total += c;
    if (c > 0) ++k;
  }
  if (total == 0) throw Error(ErrorKind::kInvalidInput, "entropy of an empty distribution");
  if (k <= 1) return 0.0;
  std::vector<double> terms;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    terms.push_back(-p * std::log(p));
  }
  return std::clamp(SortedSum(std::move(terms)) / std::log(static_cast<double>(k)), 0.0, 1.0);
}

double RetrievalDiversity(std::span<const RetrievalTrace> traces, const DocumentPool& pool,
                          DiversityKey key) {
  if (traces.empty()) throw Error(ErrorKind::kInvalidInput, "no retrieval traces");
  std::map<std::string, std::size_t> counts;
  for (const RetrievalTrace& t : traces) {
    for (const std::string& id : t.doc_ids) {
      const WeightedDocument* d = pool.Find(id);
      if (d == nullptr) {
        throw Error(ErrorKind::kInvalidInput,
                    fmt::format("trace {} names unknown document '{}'", t.query_id, id));
      }
      ++counts[key == DiversityKey::kSource ? d->source : d->topic];
    }
  }
  std::vector<std::size_t> values;
  for (const auto& [label, n] : counts) values.push_back(n);
  return NormalizedEntropy(values);
}

double BaselineBiq(std::span<const EvaluationRecord> records) {
  std::vector<double> values;
  values.reserve(records.size());
  for (const EvaluationRecord& r : records) values.push_back(r.biq);
  return AggregateScores(values, AggregateMethod::kMedian).value;
}

std::vector<BiasContribution> AttributeBias(std::span<const EvaluationRecord> records,
                                            std::span<const RetrievalTrace> traces,
                                            const DocumentPool& pool, double baseline_biq) {
  if (!std::isfinite(baseline_biq)) {
    throw Error(ErrorKind::kInvalidInput, "baseline biq must be finite");
  }
  std::map<int, std::set<std::string>> retrieved;
  for (const RetrievalTrace& t : traces) {
    if (retrieved.contains(t.query_id)) {
      throw Error(ErrorKind::kAttribution, fmt::format("two traces for query {}", t.query_id));
    }
    auto& ids = retrieved[t.query_id];
    for (const std::string& id : t.doc_ids) {
      if (pool.Find(id) == nullptr) {
        throw Error(ErrorKind::kAttribution,
                    fmt::format("trace {} names unknown document '{}'", t.query_id, id));
      }
      ids.insert(id);
    }
  }

  std::map<std::string, std::vector<double>> excess;
  for (const EvaluationRecord& r : records) {
    const auto it = retrieved.find(r.prompt_id);
    if (it == retrieved.end()) {
      throw Error(ErrorKind::kAttribution,
                  fmt::format("record for prompt {} ({}) has no retrieval trace", r.prompt_id,
                              r.model_id));
    }
    for (const std::string& id : it->second) {
      excess[id].push_back(std::max(0.0, r.biq - baseline_biq));
    }
  }

  std::vector<BiasContribution> out;
  out.reserve(pool.documents().size());
  for (const WeightedDocument& d : pool.documents()) {
    BiasContribution c{.doc_id = d.doc_id};
    if (auto it = excess.find(d.doc_id); it != excess.end()) {
      c.support = it->second.size();
      c.contribution = std::clamp(
          SortedSum(it->second) / static_cast<double>(c.support), 0.0, 1.0);
    }
    out.push_back(std::move(c));
  }
  return out;
}

DocumentPool Reweight(const DocumentPool& pool, std::span<const BiasContribution> contributions,
                      double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("eta {} outside (0, 1]", eta));
  }
  std::vector<WeightedDocument> documents = pool.documents();
  for (const BiasContribution& c : contributions) {
    auto it = std::lower_bound(documents.begin(), documents.end(), c.doc_id,
                               [](const WeightedDocument& d, const std::string& id) {
                                 return d.doc_id < id;
                               });
    if (it == documents.end() || it->doc_id != c.doc_id) {
      throw Error(ErrorKind::kInvalidInput,
                  fmt::format("contribution names unknown document '{}'", c.doc_id));
    }
    if (!(c.contribution >= 0.0 && c.contribution <= 1.0)) {
      throw Error(ErrorKind::kInvalidInput,
                  fmt::format("contribution {} for '{}' outside [0, 1]", c.contribution, c.doc_id));
    }
    it->weight = std::max(pool.weight_floor(), it->weight * (1.0 - eta * c.contribution));
  }
  return DocumentPool(std::move(documents), pool.weight_floor());
}

std::vector<RetrievedDocument> Retrieve(const DocumentPool& pool, std::string_view query,
                                        std::size_t k) {
  const std::set<std::string> query_terms = ContentTerms(query);
  std::vector<RetrievedDocument> scored;
  for (const WeightedDocument& d : pool.documents()) {
    const std::set<std::string> doc_terms = ContentTerms(d.text);
    std::size_t overlap = 0;
    for (const std::string& t : query_terms) overlap += doc_terms.count(t);
    if (overlap > 0) scored.push_back({d.doc_id, static_cast<double>(overlap) * d.weight});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<SimulationRound> SimulateReweighting(DocumentPool pool, const PromptCorpus& corpus,
                                                 const Evaluator& evaluator,
                                                 const SimulationOptions& options) {
  if (!(options.eta > 0.0 && options.eta <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("eta {} outside (0, 1]", options.eta));
  }
  if (options.top_k == 0) throw Error(ErrorKind::kInvalidInput, "top_k must be positive");

  std::vector<SimulationRound> rounds;
  double eta = options.eta;
  double baseline = options.baseline_biq;
  for (std::size_t round = 0; round < options.rounds; ++round) {
    SimulationRound r{.round = round + 1, .eta = eta};
    std::vector<EvaluationRecord> records;
    std::size_t retrieved_total = 0;
    for (const Prompt& prompt : corpus.prompts) {
      RetrievalTrace trace{prompt.id, std::string(CategoryName(prompt.category)), {}};
      std::string response;
      for (const RetrievedDocument& hit : Retrieve(pool, prompt.text, options.top_k)) {
        trace.doc_ids.push_back(hit.doc_id);
        if (!response.empty()) response.push_back(' ');
        response += pool.Find(hit.doc_id)->text;
      }
      retrieved_total += trace.doc_ids.size();
      records.push_back(evaluator.Evaluate(
          prompt, ModelResponse{prompt.id, options.model_id, std::move(response), 0,
                                ResponseSource::kReplay, 0}));
      r.traces.push_back(std::move(trace));
    }
    if (records.empty()) break;

    std::vector<double> values;
    for (const EvaluationRecord& rec : records) values.push_back(rec.biq);
    r.mean_biq = Mean(values);
    if (baseline < 0.0) baseline = BaselineBiq(records);
    if (retrieved_total > 0) {
      r.source_diversity = RetrievalDiversity(r.traces, pool, DiversityKey::kSource);
      r.topic_diversity = RetrievalDiversity(r.traces, pool, DiversityKey::kTopic);
    }
    r.contributions = AttributeBias(records, r.traces, pool, baseline);
    pool = Reweight(pool, r.contributions, eta);
    r.weights_after = pool.documents();
    if (options.adjust_eta) eta = options.adjust_eta(r.mean_biq, eta);
    rounds.push_back(std::move(r));
  }
  return rounds;
}

}  // namespace biq
