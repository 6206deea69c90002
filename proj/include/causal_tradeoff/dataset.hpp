#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causal_tradeoff/column.hpp"
#include "causal_tradeoff/scenario.hpp"

namespace causal_tradeoff {

// Column-aligned numeric table with role assignments. Columns are stored
// standardized (mean 0, variance 1, n-1 divisor).
struct Dataset {
  NumericColumn outcome;                  // y
  NumericColumn exposure;                 // x
  NumericColumn instrument;               // z
  std::vector<NumericColumn> covariates;  // w1..wJ
  std::optional<NumericColumn> latent;    // u, exposed only in oracle mode

  Eigen::Index n() const { return outcome.size(); }
  int covariate_count() const { return static_cast<int>(covariates.size()); }
  bool has_latent() const { return latent.has_value(); }
};

// Binds and standardizes the named columns of generated data. Covariate
// names default to the generated layout: w1..wJ when the data carries split
// covariates, otherwise the single structural w.
Dataset dataset_from_generated(const GeneratedData& data, bool expose_latent = false);

}  // namespace causal_tradeoff
