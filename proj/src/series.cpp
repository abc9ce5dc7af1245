#include "series.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace coverimpact {

void validate(const CoverageSeries& series) {
  if (series.epochs.size() != series.values.size()) {
    fail(ErrorCode::Param, "series epoch and value counts differ");
  }
  if (series.values.empty()) {
    fail(ErrorCode::Param, "series must contain at least one point");
  }
  for (std::size_t i = 1; i < series.epochs.size(); ++i) {
    if (series.epochs[i] <= series.epochs[i - 1]) {
      fail(ErrorCode::Param, "series epochs must be strictly increasing (epoch " +
                                 std::to_string(series.epochs[i]) + ")");
    }
  }
}

CoverageSeries make_series(std::vector<std::pair<std::int64_t, double>> points) {
  if (points.empty()) fail(ErrorCode::Param, "series must contain at least one point");
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  CoverageSeries series;
  series.epochs.reserve(points.size());
  series.values.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].first == points[i - 1].first) {
      fail(ErrorCode::Param, "duplicate epoch " + std::to_string(points[i].first));
    }
    series.epochs.push_back(points[i].first);
    series.values.push_back(points[i].second);
  }
  return series;
}

std::string series_to_csv(const CoverageSeries& series) {
  validate(series);
  std::string out = "epoch,coverage\n";
  char line[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(line, sizeof(line), "%lld,%.6f\n",
                  static_cast<long long>(series.epochs[i]), series.values[i]);
    out += line;
  }
  return out;
}

namespace {

[[noreturn]] void csv_fail(const std::string& origin, std::size_t line_no,
                           const std::string& detail) {
  fail(ErrorCode::Csv, origin + ":" + std::to_string(line_no) + ": " + detail);
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

CoverageSeries parse_series_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) csv_fail(origin, 1, "empty file");
  ++line_no;
  if (strip_cr(line) != "epoch,coverage") {
    csv_fail(origin, line_no, "expected header 'epoch,coverage'");
  }

  CoverageSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      csv_fail(origin, line_no, "expected exactly two comma-separated fields");
    }

    std::int64_t epoch = 0;
    {
      const char* first = line.data();
      const char* last = line.data() + comma;
      const auto res = std::from_chars(first, last, epoch);
      if (res.ec != std::errc{} || res.ptr != last) {
        csv_fail(origin, line_no, "invalid epoch '" + line.substr(0, comma) + "'");
      }
    }
    double value = 0.0;
    {
      const char* first = line.data() + comma + 1;
      const char* last = line.data() + line.size();
      const auto res = std::from_chars(first, last, value);
      if (res.ec != std::errc{} || res.ptr != last) {
        csv_fail(origin, line_no, "invalid coverage '" + line.substr(comma + 1) + "'");
      }
    }
    if (!series.epochs.empty() && epoch <= series.epochs.back()) {
      csv_fail(origin, line_no, "epochs must be strictly increasing");
    }
    series.epochs.push_back(epoch);
    series.values.push_back(value);
  }
  if (series.values.empty()) csv_fail(origin, line_no, "no data rows");
  return series;
}

void write_series_csv(const CoverageSeries& series, const std::string& path) {
  const std::string text = series_to_csv(series);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
  out << text;
  if (!out.good()) fail(ErrorCode::Io, "write failed: " + path);
}

CoverageSeries read_series_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open series file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_series_csv(buf.str(), path);
}

}  // namespace coverimpact
