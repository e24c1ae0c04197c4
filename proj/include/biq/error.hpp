#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biq {

enum class ErrorKind {
  kInvalidInput,
  kDivisionDegenerate,
  kEmptyAggregate,
  kParse,
  kLexicon,
  kCorpus,
  kConfiguration,
  kTransport,
  kTimeout,
  kFixtureMiss,
  kComparison,
  kAttribution,
  kEmptyReport,
  kEvaluation,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Transport failure after retries. status is 0 when no HTTP response arrived.
class TransportError : public Error {
 public:
  TransportError(int status, int attempts, const std::string& message)
      : Error(ErrorKind::kTransport, message), status_(status), attempts_(attempts) {}

  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int status_;
  int attempts_;
};

}  // namespace biq
