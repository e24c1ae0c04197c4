#include "biq/error.hpp"

namespace biq {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kDivisionDegenerate: return "division-degenerate";
    case ErrorKind::kEmptyAggregate: return "empty-aggregate";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kLexicon: return "lexicon";
    case ErrorKind::kCorpus: return "corpus";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kTimeout: return "timeout";
    case ErrorKind::kFixtureMiss: return "fixture-miss";
    case ErrorKind::kComparison: return "comparison";
    case ErrorKind::kAttribution: return "attribution";
    case ErrorKind::kEmptyReport: return "empty-report";
    case ErrorKind::kEvaluation: return "evaluation";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace biq
