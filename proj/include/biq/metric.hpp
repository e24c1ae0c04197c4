#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace biq {

/// Every input to one BiQ evaluation: the per-dimension bias scores with their
/// weights, the five scalar factors, and the coefficient applied to each.
///
/// All fields live in [0, 1]. `bias_scores` and `dimension_weights` are
/// parallel and non-empty.
struct FactorVector {
  std::vector<double> bias_scores;
  std::vector<double> dimension_weights;
  double diversity_penalty = 0.0;
  double diversity_weight = 1.0;
  double sentiment_bias = 0.0;
  double lambda = 1.0;
  double context_sensitivity = 0.0;
  double mu = 1.0;
  double mitigation = 0.0;
  double theta = 1.0;
  double adaptability = 0.0;
  double phi = 1.0;

  friend bool operator==(const FactorVector&, const FactorVector&) = default;
};

/// The coefficient half of a FactorVector. Presets fix these; the factor
/// values come from scoring.
struct Coefficients {
  double dimension_weight = 1.0;
  double diversity_weight = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double theta = 1.0;
  double phi = 1.0;

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

enum class Preset { kReplication, kAppendix, kCustom };

std::string_view PresetName(Preset preset);
Preset ParsePreset(std::string_view name);

/// Unit coefficients for kReplication and kCustom. kAppendix uses the proposed
/// general-evaluation weighting; its lambda of 0.2 is derived so that the six
/// weights sum to 1.
Coefficients PresetCoefficients(Preset preset);

enum class RangeCheck { kStrict, kLenient };

/// Throws ErrorKind::kInvalidInput on a length mismatch, an empty bias list,
/// a non-finite field, or (under kStrict) a field outside [0, 1].
void ValidateFactors(const FactorVector& factors, RangeCheck check = RangeCheck::kStrict);

struct BiqScore {
  double value = 0.0;
  FactorVector factors;
};

/// BiQ = sum(w_i * b_i) + dw * P(d) + lambda * s + mu * C + theta * M - phi * A.
/// Terms are accumulated left to right in exactly that order.
BiqScore ComputeBiq(const FactorVector& factors, RangeCheck check = RangeCheck::kStrict);

/// Bias coefficient: score_a / score_b. Throws kDivisionDegenerate when
/// |score_b| <= 1e-12.
double BiasCoefficient(double score_a, double score_b);

/// 1 / ratio. Throws kDivisionDegenerate when |ratio| <= 1e-12.
double InverseBiq(double ratio);

enum class AggregateMethod { kMean, kMedian };

std::string_view AggregateMethodName(AggregateMethod method);
AggregateMethod ParseAggregateMethod(std::string_view name);

struct AggregateScore {
  std::string category;
  AggregateMethod method = AggregateMethod::kMean;
  double value = 0.0;
  std::size_t count = 0;
};

double Mean(std::span<const double> values);
double Median(std::span<const double> values);

/// Throws kEmptyAggregate on empty input. Input is never reordered.
AggregateScore AggregateScores(std::span<const double> values, AggregateMethod method,
                               std::string category = {});

}  // namespace biq
