#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bsts.hpp"
#include "series.hpp"

namespace coverimpact {

struct ImpactConfig {
  // 1-based position splitting pre (1..index) from post (index+1..n);
  // at least 3 pre-period points are required to fit.
  int intervention_index = 0;
  ComponentKind component = ComponentKind::LocalLinearTrend;
  // Inverse-gamma prior per variance: shape used directly, scale is
  // prior_scale_factor * sample variance of the pre-period.
  double prior_shape = 0.01;
  double prior_scale_factor = 0.01;
  int n_iter = 2000;
  int burn_in = 500;
  std::uint64_t seed = 0;
  double credible_level = 0.95;
};

struct EffectBand {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct ImpactPoint {
  std::int64_t epoch = 0;
  double observed = 0.0;
  EffectBand counterfactual;
  EffectBand pointwise;   // observed - counterfactual
  EffectBand cumulative;  // running sum of pointwise effects, per draw
};

struct ImpactSummary {
  double average_effect = 0.0;
  double cumulative_effect = 0.0;
  double relative_effect = 0.0;   // cumulative effect / cumulative counterfactual
  double tail_probability = 0.0;  // draws with sign opposite the median sign
};

struct ImpactReport {
  int intervention_index = 0;
  std::int64_t intervention_epoch = 0;
  double credible_level = 0.95;
  std::vector<ImpactPoint> points;
  ImpactSummary summary;
  // Per-draw paths over the post period, kept for diagnostics and tests;
  // not serialized.
  Eigen::MatrixXd counterfactual_draws;
  Eigen::MatrixXd effect_draws;
};

// Fits the structural model on the pre-period by Gibbs sampling, forecasts
// the post-period counterfactual, and summarizes observed-minus-predicted
// effects at the configured credible level.
ImpactReport run_impact(const CoverageSeries& series, const ImpactConfig& cfg);

struct QuantileTriple {
  double lower = 0.0;
  double median = 0.0;
  double upper = 0.0;
};

// Equal-tailed empirical quantiles per column of a draws x T matrix, linear
// interpolation between order statistics.
std::vector<QuantileTriple> effect_quantiles(const Eigen::MatrixXd& draws, double level);

double quantile_interpolated(std::vector<double> values, double p);

std::string impact_to_json(const ImpactReport& report);
ImpactReport impact_from_json(const std::string& text, const std::string& origin);
std::string impact_to_csv(const ImpactReport& report);

}  // namespace coverimpact
