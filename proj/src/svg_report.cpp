#include "svg_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace coverimpact {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 170.0;
constexpr double kPanelGap = 44.0;
constexpr double kTop = 36.0;
constexpr double kLeft = 76.0;
constexpr double kRight = 24.0;
constexpr double kBottom = 40.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string num_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct LinearScale {
  double v0 = 0.0, v1 = 1.0;  // value range
  double p0 = 0.0, p1 = 1.0;  // pixel range

  double map(double v) const {
    if (v1 == v0) return 0.5 * (p0 + p1);
    return p0 + (v - v0) / (v1 - v0) * (p1 - p0);
  }
};

struct PanelLayout {
  double top = 0.0;
  double bottom = 0.0;
};

PanelLayout panel_layout(int index) {
  const double top = kTop + index * (kPanelHeight + kPanelGap);
  return {top, top + kPanelHeight};
}

void expand(double v, double& lo, double& hi) {
  lo = std::min(lo, v);
  hi = std::max(hi, v);
}

LinearScale y_scale(double lo, double hi, const PanelLayout& panel) {
  if (lo > hi) std::swap(lo, hi);
  double pad = 0.05 * (hi - lo);
  if (pad <= 0.0) pad = std::max(0.5 * std::fabs(lo), 1e-3);
  return {lo - pad, hi + pad, panel.bottom, panel.top};
}

std::string polyline(const std::vector<std::pair<double, double>>& pts,
                     const std::string& cls, const std::string& extra) {
  std::string out = "    <polyline class=\"" + cls + "\" fill=\"none\" " + extra + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) out += " ";
    out += num(pts[i].first) + "," + num(pts[i].second);
  }
  out += "\"/>\n";
  return out;
}

std::string band_polygon(const std::vector<double>& xs, const std::vector<double>& uppers,
                         const std::vector<double>& lowers) {
  std::string out =
      "    <polygon class=\"band\" fill=\"#9ecae1\" fill-opacity=\"0.45\" "
      "stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += " ";
    out += num(xs[i]) + "," + num(uppers[i]);
  }
  for (std::size_t i = xs.size(); i-- > 0;) {
    out += " " + num(xs[i]) + "," + num(lowers[i]);
  }
  out += "\"/>\n";
  return out;
}

std::string axes(const LinearScale& sy, const PanelLayout& panel) {
  std::string out;
  out += "    <rect fill=\"none\" stroke=\"#333333\" stroke-width=\"1\" x=\"" + num(kLeft) +
         "\" y=\"" + num(panel.top) + "\" width=\"" + num(kWidth - kLeft - kRight) +
         "\" height=\"" + num(kPanelHeight) + "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = sy.v0 + i * (sy.v1 - sy.v0) / 4.0;
    const double y = sy.map(v);
    out += "    <line stroke=\"#cccccc\" stroke-width=\"0.5\" x1=\"" + num(kLeft) + "\" y1=\"" +
           num(y) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" + num(y) + "\"/>\n";
    out += "    <text font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" x=\"" +
           num(kLeft - 6.0) + "\" y=\"" + num(y + 4.0) + "\">" + num_label(v) + "</text>\n";
  }
  return out;
}

}  // namespace

std::string render_report_svg(const ImpactReport& report, const CoverageSeries& series) {
  validate(series);
  const int n = static_cast<int>(series.size());
  const int idx = report.intervention_index;
  const int horizon = static_cast<int>(report.points.size());
  if (horizon == 0) fail(ErrorCode::Param, "impact report has no post-period points");
  if (idx < 1 || idx + horizon != n || series.epochs[idx - 1] != report.intervention_epoch) {
    fail(ErrorCode::Mismatch,
         "impact report epochs do not match the series (intervention epoch " +
             std::to_string(report.intervention_epoch) + ", series length " +
             std::to_string(n) + ")");
  }
  for (int t = 0; t < horizon; ++t) {
    if (report.points[t].epoch != series.epochs[idx + t]) {
      fail(ErrorCode::Mismatch, "impact report epoch " + std::to_string(report.points[t].epoch) +
                                    " not found at the matching series position");
    }
  }

  const double e0 = static_cast<double>(series.epochs.front());
  const double e1 = static_cast<double>(series.epochs.back());
  const LinearScale sx{e0, e1 == e0 ? e0 + 1.0 : e1, kLeft, kWidth - kRight};
  const double rule_x = sx.map(static_cast<double>(report.intervention_epoch));

  const double height = kTop + 3 * kPanelHeight + 2 * kPanelGap + kBottom;
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) + "\">\n";
  svg += "  <rect fill=\"#ffffff\" x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" +
         num(height) + "\"/>\n";

  const auto rule = [&](const PanelLayout& panel) {
    return "    <line class=\"intervention\" stroke=\"#555555\" stroke-width=\"1\" "
           "stroke-dasharray=\"2 3\" x1=\"" +
           num(rule_x) + "\" y1=\"" + num(panel.top) + "\" x2=\"" + num(rule_x) + "\" y2=\"" +
           num(panel.bottom) + "\"/>\n";
  };
  const auto title = [&](const PanelLayout& panel, const std::string& text) {
    return "    <text font-family=\"sans-serif\" font-size=\"13\" x=\"" + num(kLeft) +
           "\" y=\"" + num(panel.top - 8.0) + "\">" + text + "</text>\n";
  };
  const auto zero_line = [&](const LinearScale& sy, const PanelLayout&) {
    const double y = sy.map(0.0);
    return "    <line class=\"zero\" stroke=\"#888888\" stroke-width=\"1\" x1=\"" +
           num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" +
           num(y) + "\"/>\n";
  };

  std::vector<double> post_x(horizon);
  for (int t = 0; t < horizon; ++t) {
    post_x[t] = sx.map(static_cast<double>(report.points[t].epoch));
  }

  // Panel 1: observed vs counterfactual.
  {
    const PanelLayout panel = panel_layout(0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const double v : series.values) expand(v, lo, hi);
    for (const ImpactPoint& pt : report.points) {
      expand(pt.counterfactual.lower, lo, hi);
      expand(pt.counterfactual.upper, lo, hi);
    }
    const LinearScale sy = y_scale(lo, hi, panel);

    svg += "  <g class=\"panel\" id=\"panel-observed\">\n";
    svg += title(panel, "Observed (solid) vs counterfactual forecast (dashed)");
    svg += axes(sy, panel);

    std::vector<double> uppers(horizon), lowers(horizon);
    std::vector<std::pair<double, double>> cf_line(horizon);
    for (int t = 0; t < horizon; ++t) {
      uppers[t] = sy.map(report.points[t].counterfactual.upper);
      lowers[t] = sy.map(report.points[t].counterfactual.lower);
      cf_line[t] = {post_x[t], sy.map(report.points[t].counterfactual.mean)};
    }
    svg += band_polygon(post_x, uppers, lowers);

    std::vector<std::pair<double, double>> observed(n);
    for (int t = 0; t < n; ++t) {
      observed[t] = {sx.map(static_cast<double>(series.epochs[t])), sy.map(series.values[t])};
    }
    svg += polyline(observed, "observed", "stroke=\"#1a1a1a\" stroke-width=\"1.5\"");
    svg += polyline(cf_line, "counterfactual",
                    "stroke=\"#2b6cb0\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"");
    svg += rule(panel);
    svg += "  </g>\n";
  }

  // Panel 2: pointwise effect.
  {
    const PanelLayout panel = panel_layout(1);
    double lo = 0.0, hi = 0.0;
    for (const ImpactPoint& pt : report.points) {
      expand(pt.pointwise.lower, lo, hi);
      expand(pt.pointwise.upper, lo, hi);
    }
    const LinearScale sy = y_scale(lo, hi, panel);

    svg += "  <g class=\"panel\" id=\"panel-pointwise\">\n";
    svg += title(panel, "Pointwise effect (observed - counterfactual)");
    svg += axes(sy, panel);

    std::vector<double> uppers(horizon), lowers(horizon);
    std::vector<std::pair<double, double>> line(horizon);
    for (int t = 0; t < horizon; ++t) {
      uppers[t] = sy.map(report.points[t].pointwise.upper);
      lowers[t] = sy.map(report.points[t].pointwise.lower);
      line[t] = {post_x[t], sy.map(report.points[t].pointwise.mean)};
    }
    svg += band_polygon(post_x, uppers, lowers);
    svg += zero_line(sy, panel);
    svg += polyline(line, "effect", "stroke=\"#2b6cb0\" stroke-width=\"1.5\"");
    svg += rule(panel);
    svg += "  </g>\n";
  }

  // Panel 3: cumulative effect.
  {
    const PanelLayout panel = panel_layout(2);
    double lo = 0.0, hi = 0.0;
    for (const ImpactPoint& pt : report.points) {
      expand(pt.cumulative.lower, lo, hi);
      expand(pt.cumulative.upper, lo, hi);
    }
    const LinearScale sy = y_scale(lo, hi, panel);

    svg += "  <g class=\"panel\" id=\"panel-cumulative\">\n";
    svg += title(panel, "Cumulative effect");
    svg += axes(sy, panel);

    std::vector<double> uppers(horizon), lowers(horizon);
    std::vector<std::pair<double, double>> line(horizon);
    for (int t = 0; t < horizon; ++t) {
      uppers[t] = sy.map(report.points[t].cumulative.upper);
      lowers[t] = sy.map(report.points[t].cumulative.lower);
      line[t] = {post_x[t], sy.map(report.points[t].cumulative.mean)};
    }
    svg += band_polygon(post_x, uppers, lowers);
    svg += zero_line(sy, panel);
    svg += polyline(line, "effect", "stroke=\"#2b6cb0\" stroke-width=\"1.5\"");
    svg += rule(panel);
    svg += "  </g>\n";
  }

  // Shared epoch labels under the last panel.
  {
    const PanelLayout panel = panel_layout(2);
    svg += "  <g class=\"x-axis\">\n";
    const int ticks = std::min<int>(6, n);
    for (int i = 0; i < ticks; ++i) {
      const int pos = ticks == 1 ? 0 : static_cast<int>(std::lround(
                                           static_cast<double>(i) * (n - 1) / (ticks - 1)));
      const double x = sx.map(static_cast<double>(series.epochs[pos]));
      svg += "    <line stroke=\"#333333\" x1=\"" + num(x) + "\" y1=\"" + num(panel.bottom) +
             "\" x2=\"" + num(x) + "\" y2=\"" + num(panel.bottom + 5.0) + "\"/>\n";
      svg += "    <text font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" x=\"" +
             num(x) + "\" y=\"" + num(panel.bottom + 18.0) + "\">" +
             std::to_string(series.epochs[pos]) + "</text>\n";
    }
    svg += "  </g>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace coverimpact
