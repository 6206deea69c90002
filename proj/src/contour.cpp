#include "causal_tradeoff/contour.hpp"

#include <cmath>
#include <limits>

#include "causal_tradeoff/errors.hpp"

namespace causal_tradeoff {

std::vector<double> GridAxis::values() const {
  if (!(step > 0.0) || stop < start) {
    throw Error(ErrorCode::infeasible_input, "bad grid axis for " + name);
  }
  std::vector<double> out;
  for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
  return out;
}

std::string violation_key(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::exclusion_restriction: return "c_er";
    case ScenarioKind::independence: return "c_i";
    case ScenarioKind::heterogeneity: return "alpha3";
    case ScenarioKind::perfect_iv: break;
  }
  throw Error(ErrorCode::io_or_schema, "no violation axis for a perfect instrument");
}

std::string strength_key(ScenarioKind kind) {
  return kind == ScenarioKind::heterogeneity ? "alpha1" : "c3";
}

std::size_t ContourGrid::index(std::size_t i_strength, std::size_t j_violation) const {
  return i_strength * violation.values().size() + j_violation;
}

ContourGrid contour(const ScenarioSpec& base, const GridAxis& strength,
                    const GridAxis& violation) {
  ContourGrid grid;
  grid.kind = base.kind;
  grid.strength = strength;
  grid.violation = violation;
  const auto svals = strength.values();
  const auto vvals = violation.values();
  const std::size_t cells = svals.size() * vvals.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  grid.lambda2.assign(cells, nan);
  grid.lambda3.assign(cells, nan);
  grid.lambda4.assign(cells, nan);
  grid.winner.assign(cells, 0);

  for (std::size_t i = 0; i < svals.size(); ++i) {
    for (std::size_t j = 0; j < vvals.size(); ++j) {
      ScenarioSpec spec = base;
      spec.weights[strength.name] = svals[i];
      spec.weights[violation.name] = vvals[j];
      const std::size_t at = i * vvals.size() + j;
      try {
        const ClosedFormResult cf = closed_form(spec);
        grid.lambda2[at] = cf.lambda2;
        grid.lambda3[at] = cf.lambda3 ? *cf.lambda3 : nan;
        grid.lambda4[at] = cf.lambda4;
        int winner = 2;
        double best = cf.lambda2;
        if (cf.lambda3 && *cf.lambda3 < best) {
          best = *cf.lambda3;
          winner = 3;
        }
        if (cf.lambda4 < best) winner = 4;
        grid.winner[at] = winner;
        ++grid.feasible_cells;
      } catch (const Infeasible&) {
      } catch (const WeakDenominator&) {
        // Irrelevant instrument: the IV estimand is undefined, mask the cell.
      }
    }
  }
  if (grid.feasible_cells == 0) {
    throw EmptyGrid("no feasible cell on the requested grid");
  }
  return grid;
}

}  // namespace causal_tradeoff
