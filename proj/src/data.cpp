#include "biq/data.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "biq/error.hpp"

#ifndef BIQ_DEFAULT_DATA_DIR
#define BIQ_DEFAULT_DATA_DIR "data"
#endif

namespace biq {
namespace {

struct Bundle {
  BundleKind kind;
  std::string_view id;
  std::string_view relative;
};

constexpr Bundle kBundles[] = {
    {BundleKind::kCorpus, "appendix2", "corpus/appendix2.csv"},
    {BundleKind::kPublishedScores, "appendix2", "corpus/appendix2_scores.csv"},
    {BundleKind::kSentimentLexicon, "default", "lexicon/sentiment_default.tsv"},
    {BundleKind::kBiasLexicon, "default", "lexicon/bias_default.tsv"},
    {BundleKind::kFixtures, "appendix2", "fixtures/appendix2_replay.jsonl"},
    {BundleKind::kPool, "demo", "rag/demo_pool.jsonl"},
};

std::string_view KindName(BundleKind kind) {
  switch (kind) {
    case BundleKind::kCorpus: return "corpus";
    case BundleKind::kPublishedScores: return "published score table";
    case BundleKind::kSentimentLexicon: return "sentiment lexicon";
    case BundleKind::kBiasLexicon: return "bias lexicon";
    case BundleKind::kFixtures: return "fixture set";
    case BundleKind::kPool: return "document pool";
  }
  return "resource";
}

}  // namespace

std::filesystem::path DataDir() {
  if (const char* env = std::getenv("BIQ_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return BIQ_DEFAULT_DATA_DIR;
}

std::optional<std::filesystem::path> BundledPath(BundleKind kind, std::string_view id) {
  for (const Bundle& b : kBundles) {
    if (b.kind == kind && b.id == id) return DataDir() / b.relative;
  }
  return std::nullopt;
}

std::filesystem::path ResolveInput(BundleKind kind, std::string_view path_or_id) {
  std::filesystem::path candidate(path_or_id);
  std::error_code ec;
  if (std::filesystem::is_regular_file(candidate, ec)) return candidate;
  if (auto bundled = BundledPath(kind, path_or_id)) {
    if (std::filesystem::is_regular_file(*bundled, ec)) return *bundled;
    throw Error(ErrorKind::kIo, fmt::format("bundled {} '{}' missing at {}", KindName(kind),
                                            path_or_id, bundled->string()));
  }
  throw Error(ErrorKind::kIo,
              fmt::format("no file or bundled {} named '{}'", KindName(kind), path_or_id));
}

}  // namespace biq
