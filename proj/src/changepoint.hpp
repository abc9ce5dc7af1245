#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "series.hpp"

namespace coverimpact {

// Which Normal parameters are allowed to differ across the two segments.
enum class CptStatistic { Mean, Variance, MeanAndVariance };

const char* cpt_statistic_name(CptStatistic stat);
CptStatistic parse_cpt_statistic(const std::string& name);

struct CptConfig {
  CptStatistic statistic = CptStatistic::MeanAndVariance;
  // Rejection threshold c; unset means the SIC default p*ln(n), where p
  // counts the extra free parameters under the alternative including tau
  // (mean: 2, variance: 2, mean and variance: 3).
  std::optional<double> threshold_c;
  int min_seg_len = 2;
};

// Whole-series moments a segment statistic conditions on: the mean
// statistic fixes the variance at `variance`, the variance statistic fixes
// the mean at `mean`. `variance` is the maximum-likelihood (1/n) estimate.
struct SeriesMoments {
  double mean = 0.0;
  double variance = 0.0;
};

SeriesMoments series_moments(std::span<const double> y);

struct ChangepointResult {
  std::optional<int> tau_hat;  // 1-based; present iff rejected
  double lambda = 0.0;
  double threshold = 0.0;
  bool rejected = false;
  std::vector<double> per_tau_ml;  // ML(tau) for tau = min_seg_len .. n - min_seg_len
};

// Maximum Normal log-likelihood of one segment under the chosen statistic.
double segment_loglik(std::span<const double> y, CptStatistic stat,
                      const SeriesMoments& global);

// Two-segment log-likelihood at a split after 1-based index tau.
double ml_tau(const CoverageSeries& series, int tau, CptStatistic stat,
              int min_seg_len = 2);

// Scans every admissible split, forms lambda = 2*(max ML - null ML) and
// compares against the threshold.
ChangepointResult detect_single(const CoverageSeries& series, const CptConfig& cfg);

// JSON with fields tau_hat, lambda, threshold, rejected, per_tau_ml.
std::string changepoint_to_json(const ChangepointResult& result);

}  // namespace coverimpact
