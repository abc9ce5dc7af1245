#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coverimpact {

// Strictly time-ordered scalar observations. Coverage fractions in the
// pipeline, but any reals are accepted by the statistics downstream.
struct CoverageSeries {
  std::vector<std::int64_t> epochs;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

void validate(const CoverageSeries& series);

// Sorts by epoch and rejects duplicates.
CoverageSeries make_series(std::vector<std::pair<std::int64_t, double>> points);

// CSV format: header "epoch,coverage", one row per epoch, values printed
// with 6 decimal places, rows sorted by epoch.
std::string series_to_csv(const CoverageSeries& series);
CoverageSeries parse_series_csv(const std::string& text, const std::string& origin);

void write_series_csv(const CoverageSeries& series, const std::string& path);
CoverageSeries read_series_csv(const std::string& path);

}  // namespace coverimpact
