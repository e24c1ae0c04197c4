// Randomized invariants. Every generator is seeded, so failures reproduce.

#include <algorithm>
#include <cctype>
#include <random>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "biq/bias_lexicon.hpp"
#include "biq/metric.hpp"
#include "biq/monitor.hpp"
#include "biq/pipeline.hpp"
#include "biq/rag.hpp"
#include "biq/report.hpp"
#include "support.hpp"

namespace biq {
namespace {

constexpr int kTrials = 10'000;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double Unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double Range(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  std::mt19937_64& gen() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

FactorVector RandomFactors(Rng& rng) {
  FactorVector f;
  const int dims = rng.Int(1, 4);
  for (int i = 0; i < dims; ++i) {
    f.bias_scores.push_back(rng.Unit());
    f.dimension_weights.push_back(rng.Unit());
  }
  f.diversity_penalty = rng.Unit();
  f.diversity_weight = rng.Unit();
  f.sentiment_bias = rng.Unit();
  f.lambda = rng.Unit();
  f.context_sensitivity = rng.Unit();
  f.mu = rng.Unit();
  f.mitigation = rng.Unit();
  f.theta = rng.Unit();
  f.adaptability = rng.Unit();
  f.phi = rng.Unit();
  return f;
}

double Raise(Rng& rng, double x) { return x + (1.0 - x) * rng.Unit(); }

TEST(Properties, BiqMonotoneInFactors) {
  Rng rng(11);
  for (int t = 0; t < kTrials; ++t) {
    const FactorVector f = RandomFactors(rng);
    const double base = ComputeBiq(f).value;

    FactorVector g = f;
    const std::size_t i = rng.Int(0, static_cast<int>(f.bias_scores.size()) - 1);
    g.bias_scores[i] = Raise(rng, g.bias_scores[i]);
    ASSERT_GE(ComputeBiq(g).value, base) << "b, trial " << t;

    g = f;
    g.sentiment_bias = Raise(rng, g.sentiment_bias);
    ASSERT_GE(ComputeBiq(g).value, base) << "s, trial " << t;

    g = f;
    g.context_sensitivity = Raise(rng, g.context_sensitivity);
    ASSERT_GE(ComputeBiq(g).value, base) << "C, trial " << t;

    g = f;
    g.mitigation = Raise(rng, g.mitigation);
    ASSERT_GE(ComputeBiq(g).value, base) << "M, trial " << t;

    g = f;
    g.adaptability = Raise(rng, g.adaptability);
    ASSERT_LE(ComputeBiq(g).value, base) << "A, trial " << t;
  }
}

TEST(Properties, BiqBounded) {
  Rng rng(12);
  for (int t = 0; t < kTrials; ++t) {
    const FactorVector f = RandomFactors(rng);
    const double v = ComputeBiq(f).value;
    const double dims = static_cast<double>(f.bias_scores.size());
    ASSERT_GE(v, -1.0);
    ASSERT_LE(v, dims + 4.0);
  }
}

TEST(Properties, SentimentBiasIsEven) {
  Rng rng(13);
  for (int t = 0; t < kTrials; ++t) {
    const double p = rng.Range(-1.0, 1.0);
    ASSERT_EQ(SentimentBias({.polarity = p}), SentimentBias({.polarity = -p}));
    ASSERT_GE(SentimentBias({.polarity = p}), 0.0);
    ASSERT_LE(SentimentBias({.polarity = p}), 1.0);
  }
}

const SentimentLexicon& Lexicon() {
  static const SentimentLexicon lexicon = SentimentLexicon::Resolve("default");
  return lexicon;
}

const std::vector<std::string> kVocabulary = {
    "good",  "bad",    "terrible", "wonderful", "not",    "never", "very",   "extremely",
    "women", "men",    "the",      "of",        "policy", "happy", "unfair", "painful",
    "great", "really", "hopeful",  "serious",   "and",    "no",    "awful",  "significant"};

std::string RandomText(Rng& rng, int max_words = 30) {
  std::string text;
  const int n = rng.Int(0, max_words);
  for (int i = 0; i < n; ++i) {
    if (i > 0) text += rng.Int(0, 5) == 0 ? ", " : " ";
    text += kVocabulary[rng.Int(0, static_cast<int>(kVocabulary.size()) - 1)];
  }
  return text;
}

TEST(Properties, PolarityMirrorSymmetry) {
  Rng rng(14);
  const SentimentLexicon mirrored = Lexicon().Mirrored();
  for (int t = 0; t < 2000; ++t) {
    const std::string text = RandomText(rng);
    const SentimentScore a = ScoreSentiment(text, Lexicon());
    const SentimentScore b = ScoreSentiment(text, mirrored);
    ASSERT_EQ(a.polarity, -b.polarity) << text;
    ASSERT_EQ(a.subjectivity, b.subjectivity) << text;
    ASSERT_EQ(SentimentBias(a), SentimentBias(b)) << text;
  }
}

TEST(Properties, SentimentCaseInsensitive) {
  Rng rng(15);
  for (int t = 0; t < 2000; ++t) {
    const std::string text = RandomText(rng);
    std::string shouted = text;
    for (char& c : shouted) {
      if (rng.Int(0, 1) == 1) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    ASSERT_EQ(ScoreSentiment(text, Lexicon()), ScoreSentiment(shouted, Lexicon())) << shouted;
  }
}

TEST(Properties, SentimentStaysInRange) {
  Rng rng(16);
  for (int t = 0; t < 2000; ++t) {
    const SentimentScore s = ScoreSentiment(RandomText(rng, 80), Lexicon());
    ASSERT_GE(s.polarity, -1.0);
    ASSERT_LE(s.polarity, 1.0);
    ASSERT_GE(s.subjectivity, 0.0);
    ASSERT_LE(s.subjectivity, 1.0);
  }
}

TEST(Properties, AdversarialIntensifierChains) {
  for (const char* tail : {" good", " terrible", " not good", ""}) {
    std::string text;
    for (int i = 0; i < 5000; ++i) text += "extremely really very ";
    text += tail;
    const SentimentScore s = ScoreSentiment(text, Lexicon());
    EXPECT_TRUE(std::isfinite(s.polarity)) << tail;
    EXPECT_LE(std::abs(s.polarity), 1.0) << tail;
    EXPECT_LE(s.subjectivity, 1.0) << tail;
  }
  std::string negations;
  for (int i = 0; i < 5000; ++i) negations += "not ";
  EXPECT_DOUBLE_EQ(ScoreSentiment(negations + "good", Lexicon()).polarity, 0.7 * -0.5);
}

TEST(Properties, IntegratedBiasInUnitInterval) {
  Rng rng(17);
  for (int t = 0; t < kTrials; ++t) {
    const IntegrationWeights w{rng.Range(0.0, 1.0), rng.Range(0.0, 1.0)};
    const double b = IntegrateBiasScore(rng.Range(0.0, 2.0), rng.Unit(), w);
    ASSERT_GE(b, 0.0);
    ASSERT_LE(b, 1.0);
  }
}

TEST(Properties, DisparityFromRandomMentions) {
  Rng rng(18);
  const BiasLexicon lexicon = BiasLexicon::Resolve("default");
  for (int t = 0; t < 2000; ++t) {
    std::vector<GroupMention> mentions;
    const int n = rng.Int(0, 12);
    for (int i = 0; i < n; ++i) {
      const BiasDimension& d = lexicon.dimensions()[rng.Int(0, static_cast<int>(lexicon.dimensions().size()) - 1)];
      GroupMention m;
      m.dimension = d.name;
      m.group = d.groups[rng.Int(0, static_cast<int>(d.groups.size()) - 1)].group;
      m.context_polarity = rng.Range(-1.0, 1.0);
      mentions.push_back(m);
    }
    const DisparityStats stats = GroupDisparity(mentions, lexicon);
    for (const DimensionStats& d : stats.dimensions) {
      const double b = IntegrateBiasScore(d.polarity_spread, d.positive_share_spread);
      ASSERT_GE(b, 0.0);
      ASSERT_LE(b, 1.0);
    }

    std::vector<GroupMention> shuffled = mentions;
    std::shuffle(shuffled.begin(), shuffled.end(), rng.gen());
    const DisparityStats again = GroupDisparity(shuffled, lexicon);
    for (std::size_t i = 0; i < stats.dimensions.size(); ++i) {
      ASSERT_EQ(stats.dimensions[i].polarity_spread, again.dimensions[i].polarity_spread);
      ASSERT_EQ(stats.dimensions[i].positive_share_spread,
                again.dimensions[i].positive_share_spread);
    }
  }
}

TEST(Properties, FullModeBiasScoresInRange) {
  Rng rng(19);
  EvalConfig config;
  config.mode = EvalMode::kFull;
  const Evaluator evaluator = Evaluator::FromConfig(config);
  for (int t = 0; t < 1000; ++t) {
    const Prompt p{1, "q", Category::kGender};
    ModelResponse r{.prompt_id = 1, .model_id = "gpt35", .text = RandomText(rng, 60)};
    const EvaluationRecord rec = evaluator.Evaluate(p, r);
    for (double b : rec.factors.bias_scores) {
      ASSERT_GE(b, 0.0);
      ASSERT_LE(b, 1.0);
    }
  }
}

DocumentPool TenDocs() {
  std::vector<WeightedDocument> docs;
  for (int i = 0; i < 10; ++i) docs.push_back({fmt::format("d{}", i), "s", "t", "x", 1.0});
  return DocumentPool(std::move(docs));
}

TEST(Properties, AttributionPermutationInvariant) {
  Rng rng(20);
  const DocumentPool pool = TenDocs();
  for (int t = 0; t < 500; ++t) {
    std::vector<EvaluationRecord> records;
    std::vector<RetrievalTrace> traces;
    for (int q = 1; q <= 12; ++q) {
      EvaluationRecord r;
      r.prompt_id = q;
      r.biq = rng.Range(0.0, 3.0);
      records.push_back(r);
      RetrievalTrace trace{q, "g", {}};
      for (int k = 0; k < 3; ++k) trace.doc_ids.push_back(fmt::format("d{}", rng.Int(0, 9)));
      traces.push_back(trace);
    }
    const double baseline = BaselineBiq(records);
    const auto expected = AttributeBias(records, traces, pool, baseline);
    std::shuffle(records.begin(), records.end(), rng.gen());
    std::shuffle(traces.begin(), traces.end(), rng.gen());
    ASSERT_EQ(BaselineBiq(records), baseline);
    ASSERT_EQ(AttributeBias(records, traces, pool, baseline), expected);
    for (const BiasContribution& c : expected) {
      ASSERT_GE(c.contribution, 0.0);
      ASSERT_LE(c.contribution, 1.0);
    }
  }
}

TEST(Properties, ReweightStaysWithinBoundsAndNeverRaises) {
  Rng rng(21);
  DocumentPool pool = TenDocs();
  for (int round = 0; round < 2000; ++round) {
    std::vector<BiasContribution> contribs;
    for (const WeightedDocument& d : pool.documents()) contribs.push_back({d.doc_id, rng.Unit(), 1});
    const double eta = rng.Range(1e-6, 1.0);
    const DocumentPool next = Reweight(pool, contribs, eta);
    for (std::size_t i = 0; i < next.documents().size(); ++i) {
      const double w = next.documents()[i].weight;
      ASSERT_GE(w, pool.weight_floor());
      ASSERT_LE(w, 1.0);
      ASSERT_LE(w, pool.documents()[i].weight);
    }
    pool = next;
  }
}

TEST(Properties, EntropyScaleInvariantAndBounded) {
  Rng rng(22);
  for (int t = 0; t < kTrials; ++t) {
    std::vector<std::size_t> counts(rng.Int(1, 8));
    for (auto& c : counts) c = rng.Int(0, 50);
    counts[0] += 1;
    const double h = NormalizedEntropy(counts);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, 1.0);
    const std::size_t k = rng.Int(2, 9);
    std::vector<std::size_t> scaled = counts;
    for (auto& c : scaled) c *= k;
    ASSERT_NEAR(NormalizedEntropy(scaled), h, 1e-12);
    std::vector<std::size_t> shuffled = counts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng.gen());
    ASSERT_EQ(NormalizedEntropy(shuffled), h);
  }
}

TEST(Properties, EwmaBoundedAndConverges) {
  Rng rng(23);
  for (int t = 0; t < 500; ++t) {
    MonitorConfig config{.threshold = 10.0, .ewma_alpha = rng.Range(0.01, 1.0)};
    MonitorState state;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 200; ++i) {
      const double x = rng.Range(0.0, 3.0);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      state = MonitorUpdate(state, x, config).state;
      ASSERT_GE(state.ewma, lo - 1e-12);
      ASSERT_LE(state.ewma, hi + 1e-12);
    }
    const double target = rng.Range(0.0, 3.0);
    for (int i = 0; i < 5000; ++i) state = MonitorUpdate(state, target, config).state;
    ASSERT_NEAR(state.ewma, target, 1e-9);
  }
}

TEST(Properties, AtMostOneAlertPerExcursion) {
  Rng rng(24);
  const MonitorConfig config{.threshold = 1.0, .ewma_alpha = 0.4};
  MonitorState state;
  int alerts = 0, excursions = 0;
  bool above = false;
  for (int i = 0; i < kTrials; ++i) {
    const MonitorStep step = MonitorUpdate(state, rng.Range(0.0, 2.0), config);
    const bool now_above = step.state.ewma > config.threshold;
    if (now_above && !above) ++excursions;
    above = now_above;
    alerts += step.alert.has_value();
    state = step.state;
  }
  EXPECT_EQ(alerts, excursions);
  EXPECT_GT(alerts, 0);
}

TEST(Properties, RecordJsonRoundTrip) {
  Rng rng(25);
  for (int t = 0; t < 2000; ++t) {
    EvaluationRecord r;
    r.prompt_id = rng.Int(1, 100000);
    r.model_id = fmt::format("model-{}", rng.Int(0, 9));
    r.category = kAllCategories[rng.Int(0, 4)];
    r.response_text = RandomText(rng) + " \"quoted\"\n\ttab \xC3\xA9";
    r.source = ResponseSource::kCache;
    r.sentiment = {rng.Range(-1, 1), rng.Unit(), static_cast<std::size_t>(rng.Int(0, 99)),
                   static_cast<std::size_t>(rng.Int(0, 99))};
    r.factors = RandomFactors(rng);
    r.biq = ComputeBiq(r.factors).value;
    r.config_hash = "0123456789abcdef";
    ASSERT_EQ(RecordFromJson(RecordToJson(r)), r);
  }
}

TEST(Properties, FormatFixedRoundsHalfCentsUp) {
  Rng rng(26);
  for (int t = 0; t < kTrials; ++t) {
    const long cents = rng.Int(0, 10'000'000);
    const double half = (static_cast<double>(cents) * 10.0 + 5.0) / 1000.0;
    const long up = cents + 1;
    ASSERT_EQ(FormatFixed(half), fmt::format("{}.{:02}", up / 100, up % 100)) << half;
    ASSERT_EQ(FormatFixed(-half), fmt::format("-{}.{:02}", up / 100, up % 100)) << half;
  }
}

TEST(Properties, ReplayRunsByteIdenticalAcrossConcurrency) {
  const PromptCorpus corpus = LoadCorpus("appendix2");
  const auto fixtures = std::make_shared<const FixtureSet>(
      FixtureSet::Load(testing::DataDirForTests() / "fixtures" / "appendix2_replay.jsonl"));
  for (EvalMode mode : {EvalMode::kReplication, EvalMode::kFull}) {
    EvalConfig config;
    config.mode = mode;
    const Evaluator evaluator = Evaluator::FromConfig(config);
    std::string first;
    for (int concurrency : {1, 4, 16, 1}) {
      ReplayGateway gateway(fixtures, "latimer");
      const std::string bytes =
          WriteRecords(RunEvaluation(corpus, gateway, evaluator, {concurrency}).records);
      if (first.empty()) first = bytes;
      ASSERT_EQ(bytes, first) << EvalModeName(mode) << " at concurrency " << concurrency;
    }
  }
}

}  // namespace
}  // namespace biq
