#include "changepoint.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "errors.hpp"

namespace coverimpact {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double mean_of(std::span<const double> y) {
  double sum = 0.0;
  for (const double v : y) sum += v;
  return sum / static_cast<double>(y.size());
}

// Two-pass sum of squared deviations about a fixed center.
double sse_about(std::span<const double> y, double center) {
  double sse = 0.0;
  for (const double v : y) {
    const double d = v - center;
    sse += d * d;
  }
  return sse;
}

bool estimates_segment_variance(CptStatistic stat) {
  return stat == CptStatistic::Variance || stat == CptStatistic::MeanAndVariance;
}

int extra_params(CptStatistic stat) {
  return stat == CptStatistic::MeanAndVariance ? 3 : 2;
}

}  // namespace

const char* cpt_statistic_name(CptStatistic stat) {
  switch (stat) {
    case CptStatistic::Mean: return "mean";
    case CptStatistic::Variance: return "variance";
    case CptStatistic::MeanAndVariance: return "mean_and_variance";
  }
  return "mean_and_variance";
}

CptStatistic parse_cpt_statistic(const std::string& name) {
  if (name == "mean") return CptStatistic::Mean;
  if (name == "variance") return CptStatistic::Variance;
  if (name == "mean_and_variance") return CptStatistic::MeanAndVariance;
  fail(ErrorCode::Param, "unknown changepoint statistic '" + name +
                             "' (expected mean, variance, or mean_and_variance)");
}

SeriesMoments series_moments(std::span<const double> y) {
  if (y.empty()) fail(ErrorCode::Param, "moments of an empty series");
  SeriesMoments m;
  m.mean = mean_of(y);
  m.variance = sse_about(y, m.mean) / static_cast<double>(y.size());
  return m;
}

double segment_loglik(std::span<const double> y, CptStatistic stat,
                      const SeriesMoments& global) {
  const std::size_t m = y.size();
  if (m == 0) fail(ErrorCode::Param, "segment is empty");
  if (estimates_segment_variance(stat) && m < 2) {
    fail(ErrorCode::Param, "variance-estimating statistics need at least 2 points");
  }

  switch (stat) {
    case CptStatistic::Mean: {
      if (!(global.variance > 0.0)) {
        fail(ErrorCode::Degenerate, "global variance is zero; mean statistic undefined");
      }
      const double mu = mean_of(y);
      return -0.5 * static_cast<double>(m) * std::log(kTwoPi * global.variance) -
             sse_about(y, mu) / (2.0 * global.variance);
    }
    case CptStatistic::Variance: {
      const double var = sse_about(y, global.mean) / static_cast<double>(m);
      if (!(var > 0.0)) {
        fail(ErrorCode::Degenerate, "segment has zero variance about the global mean");
      }
      return -0.5 * static_cast<double>(m) * (std::log(kTwoPi * var) + 1.0);
    }
    case CptStatistic::MeanAndVariance: {
      const double mu = mean_of(y);
      const double var = sse_about(y, mu) / static_cast<double>(m);
      if (!(var > 0.0)) {
        fail(ErrorCode::Degenerate, "segment has zero variance");
      }
      return -0.5 * static_cast<double>(m) * (std::log(kTwoPi * var) + 1.0);
    }
  }
  fail(ErrorCode::Internal, "unreachable statistic");
}

namespace {

double ml_tau_impl(std::span<const double> y, int tau, CptStatistic stat,
                   const SeriesMoments& global) {
  const int n = static_cast<int>(y.size());
  double left = 0.0;
  double right = 0.0;
  try {
    left = segment_loglik(y.subspan(0, tau), stat, global);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Degenerate) {
      fail(ErrorCode::Degenerate,
           std::string(e.what()) + " (segment 1.." + std::to_string(tau) + ")");
    }
    throw;
  }
  try {
    right = segment_loglik(y.subspan(tau), stat, global);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Degenerate) {
      fail(ErrorCode::Degenerate, std::string(e.what()) + " (segment " +
                                      std::to_string(tau + 1) + ".." + std::to_string(n) + ")");
    }
    throw;
  }
  return left + right;
}

}  // namespace

double ml_tau(const CoverageSeries& series, int tau, CptStatistic stat, int min_seg_len) {
  validate(series);
  const int n = static_cast<int>(series.size());
  const int msl = estimates_segment_variance(stat) ? std::max(min_seg_len, 2) : min_seg_len;
  if (msl < 1) fail(ErrorCode::Param, "min segment length must be at least 1");
  if (tau < msl || tau > n - msl) {
    fail(ErrorCode::Param, "split index " + std::to_string(tau) +
                               " outside admissible range [" + std::to_string(msl) + "," +
                               std::to_string(n - msl) + "]");
  }
  const SeriesMoments global = series_moments(series.values);
  return ml_tau_impl(series.values, tau, stat, global);
}

ChangepointResult detect_single(const CoverageSeries& series, const CptConfig& cfg) {
  validate(series);
  if (cfg.threshold_c && !(*cfg.threshold_c > 0.0)) {
    fail(ErrorCode::Param, "threshold c must be positive");
  }
  if (cfg.min_seg_len < 1) fail(ErrorCode::Param, "min segment length must be at least 1");

  const int n = static_cast<int>(series.size());
  const int msl = estimates_segment_variance(cfg.statistic) ? std::max(cfg.min_seg_len, 2)
                                                            : cfg.min_seg_len;
  if (n < 2 * msl) {
    fail(ErrorCode::Param, "series of length " + std::to_string(n) +
                               " too short for a split with minimum segment length " +
                               std::to_string(msl));
  }

  const std::span<const double> y(series.values);
  const SeriesMoments global = series_moments(y);
  const double null_loglik = segment_loglik(y, cfg.statistic, global);

  ChangepointResult result;
  result.per_tau_ml.reserve(n - 2 * msl + 1);
  int best_tau = msl;
  double best_ml = -std::numeric_limits<double>::infinity();
  for (int tau = msl; tau <= n - msl; ++tau) {
    const double ml = ml_tau_impl(y, tau, cfg.statistic, global);
    result.per_tau_ml.push_back(ml);
    if (ml > best_ml) {  // ties keep the smallest tau
      best_ml = ml;
      best_tau = tau;
    }
  }

  result.lambda = 2.0 * (best_ml - null_loglik);
  result.threshold =
      cfg.threshold_c ? *cfg.threshold_c
                      : extra_params(cfg.statistic) * std::log(static_cast<double>(n));
  result.rejected = result.lambda > result.threshold;
  if (result.rejected) result.tau_hat = best_tau;
  return result;
}

std::string changepoint_to_json(const ChangepointResult& result) {
  nlohmann::json doc;
  if (result.tau_hat) {
    doc["tau_hat"] = *result.tau_hat;
  } else {
    doc["tau_hat"] = nullptr;
  }
  doc["lambda"] = result.lambda;
  doc["threshold"] = result.threshold;
  doc["rejected"] = result.rejected;
  doc["per_tau_ml"] = result.per_tau_ml;
  return doc.dump(2) + "\n";
}

}  // namespace coverimpact
