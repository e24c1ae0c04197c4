#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "biq/corpus.hpp"

namespace biq {

enum class ResponseSource { kLive, kReplay, kCache };

std::string_view ResponseSourceName(ResponseSource source);
ResponseSource ParseResponseSource(std::string_view name);

struct ModelResponse {
  int prompt_id = 0;
  std::string model_id;
  std::string text;  // may be empty; callers decide whether that is a failure
  std::int64_t latency_ms = 0;
  ResponseSource source = ResponseSource::kReplay;
  int attempts = 0;  // HTTP attempts made; 0 for replay and cache hits
};

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 250;
  double multiplier = 2.0;
};

struct GatewayConfig {
  std::string base_url;  // empty: $BIQ_API_BASE, then https://api.openai.com
  std::string model_name;
  std::string auth_env = "BIQ_API_KEY";
  int max_concurrency = 4;
  int timeout_ms = 60000;
  RetryPolicy retry;
  std::string cache_dir;  // empty disables the response cache
  double temperature = 0.0;
  std::optional<std::int64_t> seed;

  /// Throws kConfiguration when an invariant is broken.
  void Validate() const;
};

/// Hex digest identifying the settings that shape a completion.
std::string GatewayConfigHash(const GatewayConfig& config);

class ModelGateway {
 public:
  virtual ~ModelGateway() = default;
  virtual ModelResponse Generate(const Prompt& prompt) = 0;
  virtual const std::string& model_id() const = 0;
};

/// Recorded responses keyed by (model, prompt id). JSON lines of
/// {"model", "prompt_id", "text"}; a repeated key keeps the last text and
/// leaves a warning behind.
class FixtureSet {
 public:
  static FixtureSet Parse(std::string_view content, std::string_view origin = "<memory>");
  static FixtureSet Load(const std::filesystem::path& path);

  void Put(std::string model, int prompt_id, std::string text);
  const std::string* Find(std::string_view model, int prompt_id) const;
  std::size_t size() const { return texts_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::map<std::pair<std::string, int>, std::string, std::less<>> texts_;
  std::vector<std::string> warnings_;
};

class ReplayGateway final : public ModelGateway {
 public:
  ReplayGateway(std::shared_ptr<const FixtureSet> fixtures, std::string model_id);

  /// Throws kFixtureMiss when the fixture has no entry for this prompt.
  ModelResponse Generate(const Prompt& prompt) override;
  const std::string& model_id() const override { return model_id_; }

 private:
  std::shared_ptr<const FixtureSet> fixtures_;
  std::string model_id_;
};

/// JSON-lines response cache, {"model", "prompt_id", "config_hash", "text", "ts"}.
/// Thread-safe; every store rewrites the file atomically.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path file);

  std::optional<std::string> Lookup(std::string_view model, int prompt_id,
                                    std::string_view config_hash) const;
  void Store(const std::string& model, int prompt_id, const std::string& config_hash,
             const std::string& text);

 private:
  struct Entry {
    std::string text;
    std::int64_t ts = 0;
  };
  using Key = std::tuple<std::string, int, std::string>;

  void Persist() const;

  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<Key, Entry, std::less<>> entries_;
};

/// OpenAI-style chat-completion client: POST {base}/v1/chat/completions with
/// a single user message. Retries 429, 5xx and connection failures with
/// exponential backoff; never holds more than max_concurrency requests.
class HttpGateway final : public ModelGateway {
 public:
  /// Throws kConfiguration when the auth variable is unset, before any I/O.
  HttpGateway(GatewayConfig config, std::string model_id);

  /// Throws TransportError (non-2xx after retries, or unusable body) and
  /// ErrorKind::kTimeout.
  ModelResponse Generate(const Prompt& prompt) override;
  const std::string& model_id() const override { return model_id_; }
  const std::string& config_hash() const { return config_hash_; }

 private:
  GatewayConfig config_;
  std::string model_id_;
  std::string api_key_;
  std::string config_hash_;
  std::string scheme_host_port_;
  std::string path_;
  std::counting_semaphore<1 << 16> in_flight_;
  std::unique_ptr<ResponseCache> cache_;
};

}  // namespace biq
