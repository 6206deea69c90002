#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal_tradeoff/column.hpp"

namespace causal_tradeoff {

enum class ScenarioKind {
  perfect_iv,
  exclusion_restriction,
  independence,
  heterogeneity,
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);

// Structural edge weights for one of the four scenario families.
//
// Linear kinds use c0 (causal effect), c1 (U->X), c2 (U->Y), c3 (Z->X),
// plus c5 (W->X) and c6 (W->Y) when covariates are present; the exclusion
// restriction kind adds c_er (Z->Y) and the independence kind adds c_i
// (U->Z) and c7 (W->Z). The heterogeneity kind uses alpha1 (Z->X),
// alpha2 (U->X), alpha3 (ZU->X), alpha4 (W->X), alpha5 (ZW->X) and
// beta1 (causal effect), beta2 (U->Y), beta3 (XU->Y), beta4 (W->Y),
// beta5 (XW->Y).
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::perfect_iv;
  bool with_covariates = false;
  std::map<std::string, double> weights;

  double weight(const std::string& key) const;
  double weight_or(const std::string& key, double fallback) const;
  // Average causal effect: c0 for the linear kinds, beta1 for heterogeneity.
  double ace() const;
};

// Probability limits of the no-adjustment, adjust-for-Z, and IV estimators,
// plus their distances from the causal effect. a3 is absent for the
// heterogeneity-with-covariates scenario, where no closed form is derived.
struct ClosedFormResult {
  double a1 = 0.0;
  double a2 = 0.0;
  std::optional<double> a3;
  double a4 = 0.0;
  double lambda2 = 0.0;
  std::optional<double> lambda3;
  double lambda4 = 0.0;

  double a3_value() const;       // throws NotDerived when absent
  double lambda3_value() const;  // throws NotDerived when absent
};

// Error variance of each structural equation under the unit-variance
// constraint on every structural variable. Keys are eps_z (independence
// only), eps_x, eps_y. Throws Infeasible, naming the violated constraint,
// when any variance falls below 1e-6.
std::map<std::string, double> feasible_error_variances(const ScenarioSpec& spec);

bool is_feasible(const ScenarioSpec& spec);

ClosedFormResult closed_form(const ScenarioSpec& spec);

struct GenerateOptions {
  // Number of observed covariate columns W1..WJ. When J > 1 the structural
  // W is the restandardized first principal component of the J draws.
  int covariate_count = 1;
};

struct GeneratedData {
  std::vector<NumericColumn> columns;  // raw structural draws, population scale
  std::uint64_t seed = 0;
  Eigen::Index n = 0;

  const NumericColumn& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

// Columns are drawn one at a time in topological order (U, W, Z, X, Y) from
// a single NormalSampler stream, so output is a pure function of (spec, n,
// seed, options). Heterogeneity datasets additionally carry the XU, XW, ZU,
// ZW product columns.
GeneratedData generate(const ScenarioSpec& spec, Eigen::Index n, std::uint64_t seed,
                       const GenerateOptions& options = {});

}  // namespace causal_tradeoff
