#include "biq/monitor.hpp"

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "biq/error.hpp"
#include "biq/io.hpp"
#include "biq/metric.hpp"

namespace biq {

void MonitorConfig::Validate() const {
  if (!std::isfinite(threshold)) {
    throw Error(ErrorKind::kConfiguration, "monitor threshold must be finite");
  }
  if (!(ewma_alpha > 0.0 && ewma_alpha <= 1.0)) {
    throw Error(ErrorKind::kConfiguration, fmt::format("ewma_alpha {} outside (0, 1]", ewma_alpha));
  }
  if (min_samples < 1) throw Error(ErrorKind::kConfiguration, "min_samples must be at least 1");
  if (!(feedback_gain >= 0.0 && std::isfinite(feedback_gain))) {
    throw Error(ErrorKind::kConfiguration, "feedback_gain must be non-negative");
  }
}

double DefaultThreshold(std::span<const double> scores, double margin) {
  return Median(scores) + margin;
}

MonitorStep MonitorUpdate(const MonitorState& state, double score, const MonitorConfig& config) {
  if (!std::isfinite(score)) {
    throw Error(ErrorKind::kInvalidInput, "monitored score must be finite");
  }
  MonitorStep step{state, std::nullopt};
  MonitorState& next = step.state;
  next.ewma = state.sample_count == 0
                  ? score
                  : config.ewma_alpha * score + (1.0 - config.ewma_alpha) * state.ewma;
  ++next.sample_count;
  const std::size_t index = next.sample_count - 1;

  if (next.ewma <= config.threshold) {
    next.latched = false;
  } else if (!next.latched && next.sample_count >= config.min_samples) {
    next.latched = true;
    next.last_alert = AlertMark{index, next.ewma};
    step.alert = Alert{.index = index, .ewma = next.ewma, .threshold = config.threshold};
  }
  return step;
}

double FeedbackAdjust(const MonitorState& state, double eta, const MonitorConfig& config) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("eta {} outside (0, 1]", eta));
  }
  if (!state.latched) return eta;
  return std::min(1.0, eta * (1.0 + config.feedback_gain));
}

MonitorHub::MonitorHub(MonitorConfig config) : config_(config) { config_.Validate(); }

std::optional<Alert> MonitorHub::Observe(const std::string& model,
                                         const std::optional<std::string>& category,
                                         double score) {
  MonitorState& state = streams_[Key{model, category}];
  MonitorStep step = MonitorUpdate(state, score, config_);
  state = step.state;
  if (step.alert) {
    step.alert->model = model;
    step.alert->category = category;
  }
  return step.alert;
}

const MonitorState* MonitorHub::State(const std::string& model,
                                      const std::optional<std::string>& category) const {
  const auto it = streams_.find(Key{model, category});
  return it == streams_.end() ? nullptr : &it->second;
}

std::vector<MonitorSample> ParseMonitorSamples(std::string_view content, std::string_view origin) {
  using json = nlohmann::json;
  std::vector<MonitorSample> samples;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(content)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      MonitorSample s{j.at("model").get<std::string>(), std::nullopt, j.at("biq").get<double>()};
      if (j.contains("category") && !j["category"].is_null()) {
        s.category = j["category"].get<std::string>();
      }
      samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
  return samples;
}

std::string AlertToJson(const Alert& alert) {
  nlohmann::ordered_json j = {{"index", alert.index},
                              {"model", alert.model},
                              {"category", nullptr},
                              {"ewma", alert.ewma},
                              {"threshold", alert.threshold}};
  if (alert.category) j["category"] = *alert.category;
  return j.dump();
}

}  // namespace biq
