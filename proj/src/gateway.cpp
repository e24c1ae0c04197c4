#include "biq/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "biq/error.hpp"
#include "biq/io.hpp"

namespace biq {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kDefaultBaseUrl = "https://api.openai.com";

bool Retryable(int status) { return status == 429 || status >= 500; }

std::int64_t ElapsedMs(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

// RAII permit on the in-flight semaphore.
class Permit {
 public:
  explicit Permit(std::counting_semaphore<1 << 16>& sem) : sem_(sem) { sem_.acquire(); }
  ~Permit() { sem_.release(); }
  Permit(const Permit&) = delete;
  Permit& operator=(const Permit&) = delete;

 private:
  std::counting_semaphore<1 << 16>& sem_;
};

}  // namespace

std::string_view ResponseSourceName(ResponseSource source) {
  switch (source) {
    case ResponseSource::kLive: return "live";
    case ResponseSource::kReplay: return "replay";
    case ResponseSource::kCache: return "cache";
  }
  return "replay";
}

ResponseSource ParseResponseSource(std::string_view name) {
  if (name == "live") return ResponseSource::kLive;
  if (name == "replay") return ResponseSource::kReplay;
  if (name == "cache") return ResponseSource::kCache;
  throw Error(ErrorKind::kParse, fmt::format("unknown response source '{}'", name));
}

void GatewayConfig::Validate() const {
  auto fail = [](const std::string& why) { return Error(ErrorKind::kConfiguration, why); };
  if (max_concurrency < 1) throw fail("max_concurrency must be at least 1");
  if (max_concurrency > (1 << 16)) throw fail("max_concurrency is too large");
  if (timeout_ms < 1) throw fail("timeout_ms must be positive");
  if (retry.max_attempts < 1) throw fail("retry.max_attempts must be at least 1");
  if (retry.initial_backoff_ms < 0) throw fail("retry.initial_backoff_ms must be non-negative");
  if (!(retry.multiplier >= 1.0)) throw fail("retry.multiplier must be at least 1");
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw fail("temperature must be in [0, 2]");
  if (auth_env.empty()) throw fail("auth_env must name an environment variable");
}

std::string GatewayConfigHash(const GatewayConfig& config) {
  json j = {{"base_url", config.base_url},
            {"model_name", config.model_name},
            {"temperature", config.temperature}};
  if (config.seed) j["seed"] = *config.seed;
  return Sha256Hex(j.dump()).substr(0, 16);
}

// --- FixtureSet -------------------------------------------------------------

FixtureSet FixtureSet::Parse(std::string_view content, std::string_view origin) {
  FixtureSet set;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto fail = [&](std::string_view why) {
      return Error(ErrorKind::kParse, fmt::format("{}:{}: {}", origin, line_no, why));
    };
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw fail("invalid JSON");
    }
    if (!j.is_object()) throw fail("record must be a JSON object");
    if (!j.contains("model") || !j["model"].is_string()) throw fail("missing string field 'model'");
    if (!j.contains("prompt_id") || !j["prompt_id"].is_number_integer()) {
      throw fail("missing integer field 'prompt_id'");
    }
    if (!j.contains("text") || !j["text"].is_string()) throw fail("missing string field 'text'");
    const std::string model = j["model"].get<std::string>();
    const int prompt_id = j["prompt_id"].get<int>();
    if (set.Find(model, prompt_id) != nullptr) {
      set.warnings_.push_back(fmt::format("{}:{}: duplicate fixture ({}, {}); last one wins",
                                          origin, line_no, model, prompt_id));
    }
    set.Put(model, prompt_id, j["text"].get<std::string>());
  }
  return set;
}

FixtureSet FixtureSet::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

void FixtureSet::Put(std::string model, int prompt_id, std::string text) {
  texts_[{std::move(model), prompt_id}] = std::move(text);
}

const std::string* FixtureSet::Find(std::string_view model, int prompt_id) const {
  auto it = texts_.find(std::pair<std::string, int>{std::string(model), prompt_id});
  return it == texts_.end() ? nullptr : &it->second;
}

// --- ReplayGateway -----------------------------------------------------------

ReplayGateway::ReplayGateway(std::shared_ptr<const FixtureSet> fixtures, std::string model_id)
    : fixtures_(std::move(fixtures)), model_id_(std::move(model_id)) {
  if (!fixtures_) throw Error(ErrorKind::kConfiguration, "replay gateway needs a fixture set");
}

ModelResponse ReplayGateway::Generate(const Prompt& prompt) {
  const std::string* text = fixtures_->Find(model_id_, prompt.id);
  if (text == nullptr) {
    throw Error(ErrorKind::kFixtureMiss,
                fmt::format("no fixture for model '{}' prompt {}", model_id_, prompt.id));
  }
  return ModelResponse{.prompt_id = prompt.id,
                       .model_id = model_id_,
                       .text = *text,
                       .latency_ms = 0,
                       .source = ResponseSource::kReplay,
                       .attempts = 0};
}

// --- ResponseCache -----------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
  std::error_code ec;
  if (!std::filesystem::exists(file_, ec)) return;
  std::size_t line_no = 0;
  const std::string content = ReadFile(file_);
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      entries_[Key{j.at("model").get<std::string>(), j.at("prompt_id").get<int>(),
                   j.at("config_hash").get<std::string>()}] =
          Entry{j.at("text").get<std::string>(), j.value("ts", std::int64_t{0})};
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse,
                  fmt::format("{}:{}: bad cache record: {}", file_.string(), line_no, e.what()));
    }
  }
}

std::optional<std::string> ResponseCache::Lookup(std::string_view model, int prompt_id,
                                                 std::string_view config_hash) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(Key{std::string(model), prompt_id, std::string(config_hash)});
  if (it == entries_.end()) return std::nullopt;
  return it->second.text;
}

void ResponseCache::Store(const std::string& model, int prompt_id, const std::string& config_hash,
                          const std::string& text) {
  std::lock_guard lock(mutex_);
  const auto ts = std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  entries_[Key{model, prompt_id, config_hash}] = Entry{text, ts};
  Persist();
}

void ResponseCache::Persist() const {
  std::string out;
  for (const auto& [key, entry] : entries_) {
    const auto& [model, prompt_id, hash] = key;
    out += json{{"model", model},
                {"prompt_id", prompt_id},
                {"config_hash", hash},
                {"text", entry.text},
                {"ts", entry.ts}}
               .dump();
    out.push_back('\n');
  }
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  WriteFileAtomic(file_, out);
}

// --- HttpGateway --------------------------------------------------------------

HttpGateway::HttpGateway(GatewayConfig config, std::string model_id)
    : config_(std::move(config)),
      model_id_(std::move(model_id)),
      in_flight_(std::clamp(config_.max_concurrency, 1, 1 << 16)) {
  config_.Validate();
  const char* key = std::getenv(config_.auth_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorKind::kConfiguration,
                fmt::format("environment variable {} is not set", config_.auth_env));
  }
  api_key_ = key;
  if (config_.model_name.empty()) config_.model_name = model_id_;

  std::string base = config_.base_url;
  if (base.empty()) {
    const char* env = std::getenv("BIQ_API_BASE");
    base = env != nullptr && *env != '\0' ? env : std::string(kDefaultBaseUrl);
  }
  config_.base_url = base;
  const std::size_t scheme_end = base.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kConfiguration, fmt::format("base URL '{}' lacks a scheme", base));
  }
  const std::size_t path_start = base.find('/', scheme_end + 3);
  scheme_host_port_ = base.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix.ends_with("/v1") ? prefix + "/chat/completions" : prefix + "/v1/chat/completions";

  config_hash_ = GatewayConfigHash(config_);
  if (!config_.cache_dir.empty()) {
    cache_ = std::make_unique<ResponseCache>(std::filesystem::path(config_.cache_dir) /
                                             "responses.jsonl");
  }
}

ModelResponse HttpGateway::Generate(const Prompt& prompt) {
  const auto started = Clock::now();
  if (cache_) {
    if (auto text = cache_->Lookup(model_id_, prompt.id, config_hash_)) {
      return ModelResponse{prompt.id, model_id_, std::move(*text), 0, ResponseSource::kCache, 0};
    }
  }

  json body = {{"model", config_.model_name},
               {"messages", json::array({{{"role", "user"}, {"content", prompt.text}}})},
               {"temperature", config_.temperature}};
  if (config_.seed) body["seed"] = *config_.seed;
  const std::string payload = body.dump();

  const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
  int attempts = 0;
  int last_status = 0;
  bool last_timed_out = false;
  std::string last_error;
  double backoff_ms = config_.retry.initial_backoff_ms;

  Permit permit(in_flight_);
  while (attempts < config_.retry.max_attempts) {
    if (attempts > 0 && backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(std::llround(backoff_ms)));
      backoff_ms *= config_.retry.multiplier;
    }
    ++attempts;

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

    const auto attempt_start = Clock::now();
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      const auto err = res.error();
      last_status = 0;
      last_timed_out = err == httplib::Error::ConnectionTimeout ||
                       (err == httplib::Error::Read && Clock::now() - attempt_start >= timeout);
      last_error = httplib::to_string(err);
      continue;
    }
    last_timed_out = false;
    last_status = res->status;
    if (res->status >= 200 && res->status < 300) {
      try {
        const json reply = json::parse(res->body);
        std::string text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (cache_) cache_->Store(model_id_, prompt.id, config_hash_, text);
        return ModelResponse{prompt.id, model_id_, std::move(text), ElapsedMs(started),
                             ResponseSource::kLive, attempts};
      } catch (const json::exception& e) {
        throw TransportError(res->status, attempts,
                             fmt::format("unusable completion body for prompt {}: {}", prompt.id,
                                         e.what()));
      }
    }
    last_error = fmt::format("HTTP {}", res->status);
    if (!Retryable(res->status)) break;
  }

  if (last_timed_out) {
    throw Error(ErrorKind::kTimeout,
                fmt::format("prompt {} timed out after {} attempt(s)", prompt.id, attempts));
  }
  throw TransportError(last_status, attempts,
                       fmt::format("prompt {} failed after {} attempt(s): {}", prompt.id, attempts,
                                   last_error));
}

}  // namespace biq
