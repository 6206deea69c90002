#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causal_tradeoff/column.hpp"

namespace causal_tradeoff {

struct RegressionFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  double r_squared = 0.0;
  Eigen::Index n = 0;
  std::vector<std::string> regressor_names;
};

struct TslsFit {
  // Endogenous coefficients first, then exogenous, matching regressor_names.
  Eigen::VectorXd coefficients;
  std::vector<std::string> regressor_names;
  std::vector<double> first_stage_f;  // one per instrumented regressor
  std::optional<double> wald_ratio;   // single-IV, no-exogenous case only
  bool weak_instrument = false;       // any first-stage F below 10
};

struct PartialR2 {
  double value = 0.0;
  std::string target;
  std::vector<std::string> added_regressors;
  std::vector<std::string> conditioning_set;
};

// No-intercept least squares on centered columns, solved by column-pivoted
// Householder QR. Throws Collinear when the design is numerically singular
// (condition estimate above 1e10) and rejects non-centered input.
RegressionFit fit_ols(const NumericColumn& y, const std::vector<NumericColumn>& X);

// Residual of target after projecting out the columns of Z. Empty Z returns
// the target unchanged.
NumericColumn residualize(const NumericColumn& target, const std::vector<NumericColumn>& Z);

// R-squared of y against the column span of X, tolerant of rank deficiency
// (projection onto the column space). Empty X gives 0.
double r_squared_of(const NumericColumn& y, const std::vector<NumericColumn>& X);

// (R2_full - R2_reduced) / (1 - R2_reduced), clamped into [0, 1].
PartialR2 partial_r2(const NumericColumn& y, const std::vector<NumericColumn>& added,
                     const std::vector<NumericColumn>& given);

// Two-stage least squares. First stage regresses each endogenous column on
// instruments + exogenous; second stage regresses y on the fitted values +
// exogenous. Requires at least as many instruments as endogenous columns.
TslsFit fit_2sls(const NumericColumn& y, const std::vector<NumericColumn>& endogenous,
                 const std::vector<NumericColumn>& instruments,
                 const std::vector<NumericColumn>& exogenous);

// Joint F statistic for the instruments in the first-stage regression of
// `endogenous` on instruments + exogenous, with the (n - k - 1) denominator
// degrees of freedom of the usual with-intercept convention. Capped at 1e15.
double first_stage_f(const NumericColumn& endogenous,
                     const std::vector<NumericColumn>& instruments,
                     const std::vector<NumericColumn>& exogenous);

}  // namespace causal_tradeoff
