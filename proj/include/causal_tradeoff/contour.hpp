#pragma once

#include <string>
#include <vector>

#include "causal_tradeoff/scenario.hpp"

namespace causal_tradeoff {

struct GridAxis {
  std::string name;  // weight key being swept
  double start = 0.0;
  double stop = 0.0;
  double step = 0.05;

  std::vector<double> values() const;
};

// Analytical surfaces over (instrument strength, violation degree): the three
// inconsistencies and the pointwise winner. Infeasible cells are masked.
struct ContourGrid {
  ScenarioKind kind;
  GridAxis strength;   // c3, or alpha1 for heterogeneity
  GridAxis violation;  // c_er, c_i, or alpha3
  std::vector<double> lambda2, lambda3, lambda4;  // row-major, NaN when masked
  std::vector<int> winner;  // 2, 3, 4 for the smallest inconsistency; 0 masked
  int feasible_cells = 0;

  std::size_t index(std::size_t i_strength, std::size_t j_violation) const;
};

// Sweeps the strength/violation axes of `base`, holding its other weights
// fixed. Throws EmptyGrid when no cell is feasible.
ContourGrid contour(const ScenarioSpec& base, const GridAxis& strength,
                    const GridAxis& violation);

// Weight key of the violation axis for a kind ("c_er", "c_i", "alpha3").
std::string violation_key(ScenarioKind kind);
std::string strength_key(ScenarioKind kind);

}  // namespace causal_tradeoff
