#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace biq {

struct MonitorConfig {
  double threshold = 1.0;
  double ewma_alpha = 0.3;      // (0, 1]
  std::size_t min_samples = 1;  // >= 1
  double feedback_gain = 0.5;   // >= 0

  /// Throws kConfiguration.
  void Validate() const;
};

inline constexpr double kDefaultThresholdMargin = 0.25;

/// Median of `scores` plus the margin; a starting point to tune per deployment.
double DefaultThreshold(std::span<const double> scores, double margin = kDefaultThresholdMargin);

struct AlertMark {
  std::size_t index = 0;
  double ewma = 0.0;

  friend bool operator==(const AlertMark&, const AlertMark&) = default;
};

struct MonitorState {
  double ewma = 0.0;
  std::size_t sample_count = 0;
  bool latched = false;  // set by an alert, cleared once ewma <= threshold
  std::optional<AlertMark> last_alert;

  friend bool operator==(const MonitorState&, const MonitorState&) = default;
};

struct Alert {
  std::size_t index = 0;  // zero-based position of the triggering sample in its stream
  double ewma = 0.0;      // > threshold
  double threshold = 0.0;
  std::string model;
  std::optional<std::string> category;

  friend bool operator==(const Alert&, const Alert&) = default;
};

struct MonitorStep {
  MonitorState state;
  std::optional<Alert> alert;
};

/// Throws kInvalidInput for a non-finite score.
MonitorStep MonitorUpdate(const MonitorState& state, double score, const MonitorConfig& config);

/// min(1, eta * (1 + gain)) while an alert is latched, else eta.
/// Throws kInvalidInput for eta outside (0, 1].
double FeedbackAdjust(const MonitorState& state, double eta, const MonitorConfig& config);

/// One independent stream per (model, category).
class MonitorHub {
 public:
  explicit MonitorHub(MonitorConfig config);

  std::optional<Alert> Observe(const std::string& model, const std::optional<std::string>& category,
                               double score);
  const MonitorState* State(const std::string& model,
                            const std::optional<std::string>& category) const;
  std::size_t stream_count() const { return streams_.size(); }
  const MonitorConfig& config() const { return config_; }

 private:
  using Key = std::pair<std::string, std::optional<std::string>>;
  MonitorConfig config_;
  std::map<Key, MonitorState> streams_;
};

struct MonitorSample {
  std::string model;
  std::optional<std::string> category;
  double biq = 0.0;
};

/// JSON lines of {model, category?, biq}. Throws kParse with "origin:line".
std::vector<MonitorSample> ParseMonitorSamples(std::string_view content,
                                               std::string_view origin = "<memory>");
std::string AlertToJson(const Alert& alert);

}  // namespace biq
