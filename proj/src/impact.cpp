#include "impact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "errors.hpp"

namespace coverimpact {

namespace {

double sample_variance(std::span<const double> y) {
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (const double v : y) mean += v;
  mean /= n;
  double sse = 0.0;
  for (const double v : y) sse += (v - mean) * (v - mean);
  return y.size() > 1 ? sse / (n - 1.0) : 0.0;
}

std::uint64_t forecast_seed(std::uint64_t fit_seed) {
  return fit_seed ^ 0x9E3779B97F4A7C15ULL;
}

nlohmann::json band_to_json(const EffectBand& band) {
  return {{"mean", band.mean}, {"lower", band.lower}, {"upper", band.upper}};
}

EffectBand band_from_json(const nlohmann::json& doc) {
  EffectBand band;
  band.mean = doc.at("mean").get<double>();
  band.lower = doc.at("lower").get<double>();
  band.upper = doc.at("upper").get<double>();
  return band;
}

}  // namespace

double quantile_interpolated(std::vector<double> values, double p) {
  if (values.empty()) fail(ErrorCode::Param, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::Param, "quantile probability outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<QuantileTriple> effect_quantiles(const Eigen::MatrixXd& draws, double level) {
  if (draws.rows() < 2) fail(ErrorCode::Param, "quantiles need at least 2 draws");
  if (!(level > 0.0 && level < 1.0)) {
    fail(ErrorCode::Param, "credible level must lie strictly between 0 and 1");
  }
  const double tail = 0.5 * (1.0 - level);
  std::vector<QuantileTriple> out(draws.cols());
  std::vector<double> col(draws.rows());
  for (int t = 0; t < draws.cols(); ++t) {
    for (int i = 0; i < draws.rows(); ++i) col[i] = draws(i, t);
    out[t].lower = quantile_interpolated(col, tail);
    out[t].median = quantile_interpolated(col, 0.5);
    out[t].upper = quantile_interpolated(col, 1.0 - tail);
  }
  return out;
}

ImpactReport run_impact(const CoverageSeries& series, const ImpactConfig& cfg) {
  validate(series);
  const int n = static_cast<int>(series.size());
  const int idx = cfg.intervention_index;
  if (idx < 3 || idx > n - 1) {
    fail(ErrorCode::Param, "intervention index " + std::to_string(idx) +
                               " must satisfy 3 <= index <= n-1 (n=" + std::to_string(n) + ")");
  }
  if (!(cfg.credible_level > 0.0 && cfg.credible_level < 1.0)) {
    fail(ErrorCode::Param, "credible level must lie strictly between 0 and 1");
  }
  if (!(cfg.prior_shape > 0.0) || !(cfg.prior_scale_factor > 0.0)) {
    fail(ErrorCode::Param, "prior shape and scale factor must be positive");
  }

  const std::span<const double> pre(series.values.data(), static_cast<std::size_t>(idx));
  const double pre_var = sample_variance(pre);
  if (!(pre_var > 0.0)) {
    fail(ErrorCode::Degenerate, "pre-period is constant; cannot fit a model");
  }

  std::vector<double> init_state_vars;
  if (cfg.component == ComponentKind::LocalLevel) {
    init_state_vars = {0.1 * pre_var};
  } else {
    init_state_vars = {0.1 * pre_var, 0.01 * pre_var};
  }
  const StateSpaceModel model =
      build_model(cfg.component, 0.5 * pre_var, init_state_vars, pre_var);

  GibbsPriors priors;
  priors.obs = {cfg.prior_shape, cfg.prior_scale_factor * pre_var};
  priors.state.assign(model.q, {cfg.prior_shape, cfg.prior_scale_factor * pre_var});

  const PosteriorDraws draws =
      gibbs_sample(model, pre, priors, cfg.n_iter, cfg.burn_in, cfg.seed);

  const int horizon = n - idx;
  const Eigen::MatrixXd pred =
      posterior_predict(draws, model, horizon, forecast_seed(cfg.seed));

  ImpactReport report;
  report.intervention_index = idx;
  report.intervention_epoch = series.epochs[idx - 1];
  report.credible_level = cfg.credible_level;
  report.counterfactual_draws = pred;

  report.effect_draws.resize(pred.rows(), horizon);
  Eigen::MatrixXd cumulative(pred.rows(), horizon);
  for (int i = 0; i < pred.rows(); ++i) {
    double running = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const double effect = series.values[idx + t] - pred(i, t);
      report.effect_draws(i, t) = effect;
      running += effect;
      cumulative(i, t) = running;
    }
  }

  const auto cf_q = effect_quantiles(pred, cfg.credible_level);
  const auto eff_q = effect_quantiles(report.effect_draws, cfg.credible_level);
  const auto cum_q = effect_quantiles(cumulative, cfg.credible_level);

  report.points.resize(horizon);
  double effect_mean_sum = 0.0;
  for (int t = 0; t < horizon; ++t) {
    ImpactPoint& pt = report.points[t];
    pt.epoch = series.epochs[idx + t];
    pt.observed = series.values[idx + t];
    const double cf_mean = pred.col(t).mean();
    pt.counterfactual = {cf_mean, cf_q[t].lower, cf_q[t].upper};
    pt.pointwise = {pt.observed - cf_mean, eff_q[t].lower, eff_q[t].upper};
    pt.cumulative = {cumulative.col(t).mean(), cum_q[t].lower, cum_q[t].upper};
    effect_mean_sum += pt.pointwise.mean;
  }

  report.summary.average_effect = effect_mean_sum / horizon;
  report.summary.cumulative_effect = report.points.back().cumulative.mean;

  const double cum_counterfactual_mean = pred.rowwise().sum().mean();
  if (std::fabs(cum_counterfactual_mean) < 1e-9) {
    fail(ErrorCode::Degenerate,
         "cumulative counterfactual is too close to zero for a relative effect");
  }
  report.summary.relative_effect =
      report.summary.cumulative_effect / cum_counterfactual_mean;

  std::vector<double> totals(pred.rows());
  for (int i = 0; i < pred.rows(); ++i) totals[i] = cumulative(i, horizon - 1);
  const double median_total = quantile_interpolated(totals, 0.5);
  const double sign = median_total >= 0.0 ? 1.0 : -1.0;
  int opposite = 0;
  for (const double total : totals) {
    if (total * sign < 0.0) ++opposite;
  }
  report.summary.tail_probability =
      static_cast<double>(opposite) / static_cast<double>(totals.size());

  return report;
}

std::string impact_to_json(const ImpactReport& report) {
  nlohmann::json doc;
  doc["intervention_index"] = report.intervention_index;
  doc["intervention_epoch"] = report.intervention_epoch;
  doc["credible_level"] = report.credible_level;
  nlohmann::json points = nlohmann::json::array();
  for (const ImpactPoint& pt : report.points) {
    points.push_back({{"epoch", pt.epoch},
                      {"observed", pt.observed},
                      {"counterfactual", band_to_json(pt.counterfactual)},
                      {"pointwise", band_to_json(pt.pointwise)},
                      {"cumulative", band_to_json(pt.cumulative)}});
  }
  doc["points"] = std::move(points);
  doc["summary"] = {{"average_effect", report.summary.average_effect},
                    {"cumulative_effect", report.summary.cumulative_effect},
                    {"relative_effect", report.summary.relative_effect},
                    {"tail_probability", report.summary.tail_probability}};
  return doc.dump(2) + "\n";
}

ImpactReport impact_from_json(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Decode, origin + ": invalid impact JSON: " + e.what());
  }
  ImpactReport report;
  try {
    report.intervention_index = doc.at("intervention_index").get<int>();
    report.intervention_epoch = doc.at("intervention_epoch").get<std::int64_t>();
    report.credible_level = doc.at("credible_level").get<double>();
    for (const auto& item : doc.at("points")) {
      ImpactPoint pt;
      pt.epoch = item.at("epoch").get<std::int64_t>();
      pt.observed = item.at("observed").get<double>();
      pt.counterfactual = band_from_json(item.at("counterfactual"));
      pt.pointwise = band_from_json(item.at("pointwise"));
      pt.cumulative = band_from_json(item.at("cumulative"));
      report.points.push_back(pt);
    }
    const auto& summary = doc.at("summary");
    report.summary.average_effect = summary.at("average_effect").get<double>();
    report.summary.cumulative_effect = summary.at("cumulative_effect").get<double>();
    report.summary.relative_effect = summary.at("relative_effect").get<double>();
    report.summary.tail_probability = summary.at("tail_probability").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Decode, origin + ": invalid impact JSON: " + e.what());
  }
  if (report.points.empty()) {
    fail(ErrorCode::Decode, origin + ": impact JSON contains no post-period points");
  }
  return report;
}

std::string impact_to_csv(const ImpactReport& report) {
  std::string out =
      "epoch,observed,counterfactual_mean,counterfactual_lower,counterfactual_upper,"
      "effect_mean,effect_lower,effect_upper,"
      "cumulative_mean,cumulative_lower,cumulative_upper\n";
  char line[320];
  for (const ImpactPoint& pt : report.points) {
    std::snprintf(line, sizeof(line),
                  "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  static_cast<long long>(pt.epoch), pt.observed, pt.counterfactual.mean,
                  pt.counterfactual.lower, pt.counterfactual.upper, pt.pointwise.mean,
                  pt.pointwise.lower, pt.pointwise.upper, pt.cumulative.mean,
                  pt.cumulative.lower, pt.cumulative.upper);
    out += line;
  }
  return out;
}

}  // namespace coverimpact
