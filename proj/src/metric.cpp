#include "biq/metric.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "biq/error.hpp"

namespace biq {
namespace {

constexpr double kDegenerateTolerance = 1e-12;

void CheckField(std::string_view name, double value, RangeCheck check) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("factor {} is not finite", name));
  }
  if (check == RangeCheck::kStrict && (value < 0.0 || value > 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("factor {} = {} outside [0, 1]", name, value));
  }
}

}  // namespace

std::string_view PresetName(Preset preset) {
  switch (preset) {
    case Preset::kReplication: return "replication";
    case Preset::kAppendix: return "appendix";
    case Preset::kCustom: return "custom";
  }
  return "custom";
}

Preset ParsePreset(std::string_view name) {
  if (name == "replication") return Preset::kReplication;
  if (name == "appendix") return Preset::kAppendix;
  if (name == "custom") return Preset::kCustom;
  throw Error(ErrorKind::kConfiguration, fmt::format("unknown preset '{}'", name));
}

Coefficients PresetCoefficients(Preset preset) {
  if (preset == Preset::kAppendix) {
    return Coefficients{.dimension_weight = 0.2,
                        .diversity_weight = 0.2,
                        .lambda = 0.2,
                        .mu = 0.15,
                        .theta = 0.2,
                        .phi = 0.05};
  }
  return Coefficients{};
}

void ValidateFactors(const FactorVector& f, RangeCheck check) {
  if (f.bias_scores.empty()) {
    throw Error(ErrorKind::kInvalidInput, "bias_scores is empty");
  }
  if (f.bias_scores.size() != f.dimension_weights.size()) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("bias_scores has {} entries but dimension_weights has {}",
                            f.bias_scores.size(), f.dimension_weights.size()));
  }
  for (std::size_t i = 0; i < f.bias_scores.size(); ++i) {
    CheckField(fmt::format("bias_scores[{}]", i), f.bias_scores[i], check);
    CheckField(fmt::format("dimension_weights[{}]", i), f.dimension_weights[i], check);
  }
  CheckField("diversity_penalty", f.diversity_penalty, check);
  CheckField("diversity_weight", f.diversity_weight, check);
  CheckField("sentiment_bias", f.sentiment_bias, check);
  CheckField("lambda", f.lambda, check);
  CheckField("context_sensitivity", f.context_sensitivity, check);
  CheckField("mu", f.mu, check);
  CheckField("mitigation", f.mitigation, check);
  CheckField("theta", f.theta, check);
  CheckField("adaptability", f.adaptability, check);
  CheckField("phi", f.phi, check);
}

BiqScore ComputeBiq(const FactorVector& f, RangeCheck check) {
  ValidateFactors(f, check);
  double value = 0.0;
  for (std::size_t i = 0; i < f.bias_scores.size(); ++i) {
    value += f.dimension_weights[i] * f.bias_scores[i];
  }
  value += f.diversity_weight * f.diversity_penalty;
  value += f.lambda * f.sentiment_bias;
  value += f.mu * f.context_sensitivity;
  value += f.theta * f.mitigation;
  value -= f.phi * f.adaptability;
  return BiqScore{value, f};
}

double BiasCoefficient(double score_a, double score_b) {
  if (!std::isfinite(score_a) || !std::isfinite(score_b)) {
    throw Error(ErrorKind::kInvalidInput, "bias coefficient inputs must be finite");
  }
  if (std::abs(score_b) <= kDegenerateTolerance) {
    throw Error(ErrorKind::kDivisionDegenerate,
                fmt::format("bias coefficient denominator {} is zero", score_b));
  }
  return score_a / score_b;
}

double InverseBiq(double ratio) {
  if (!std::isfinite(ratio)) {
    throw Error(ErrorKind::kInvalidInput, "ratio must be finite");
  }
  if (std::abs(ratio) <= kDegenerateTolerance) {
    throw Error(ErrorKind::kDivisionDegenerate, "cannot invert a zero bias coefficient");
  }
  return 1.0 / ratio;
}

std::string_view AggregateMethodName(AggregateMethod method) {
  return method == AggregateMethod::kMedian ? "median" : "mean";
}

AggregateMethod ParseAggregateMethod(std::string_view name) {
  if (name == "mean") return AggregateMethod::kMean;
  if (name == "median") return AggregateMethod::kMedian;
  throw Error(ErrorKind::kConfiguration, fmt::format("unknown aggregate method '{}'", name));
}

double Mean(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::kEmptyAggregate, "cannot aggregate an empty list");
  }
  // Offsets from the first element keep a constant list exact.
  const double pivot = values.front();
  double offset_sum = 0.0;
  for (double v : values) offset_sum += v - pivot;
  return pivot + offset_sum / static_cast<double>(values.size());
}

double Median(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::kEmptyAggregate, "cannot aggregate an empty list");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

AggregateScore AggregateScores(std::span<const double> values, AggregateMethod method,
                               std::string category) {
  const double value = method == AggregateMethod::kMedian ? Median(values) : Mean(values);
  return AggregateScore{std::move(category), method, value, values.size()};
}

}  // namespace biq
