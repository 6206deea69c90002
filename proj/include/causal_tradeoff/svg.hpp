#pragma once

#include <string>

#include "causal_tradeoff/contour.hpp"
#include "causal_tradeoff/sensitivity.hpp"

namespace causal_tradeoff {

// Standalone SVG renderings of the report objects. Every number shown in a
// legend is printed with the same %.4g format the consistency tests parse.
std::string svg_format(double value);

std::string sensitivity_svg(const SensitivityReport& report, const BranchReport& branch);

std::string contour_svg(const ContourGrid& grid);

}  // namespace causal_tradeoff
