#pragma once

#include <string>

#include "impact.hpp"
#include "series.hpp"

namespace coverimpact {

// Three stacked panels over a shared epoch axis: observed vs counterfactual,
// pointwise effect, cumulative effect. Bands cover the post period only and
// a vertical rule marks the intervention epoch in every panel.
std::string render_report_svg(const ImpactReport& report, const CoverageSeries& series);

}  // namespace coverimpact
