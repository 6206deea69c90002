#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "causal_tradeoff/errors.hpp"

namespace causal_tradeoff {

// A named numeric column. All statistics in this library use the n-1 divisor
// for variances; fits expect columns centered to sample mean zero.
struct NumericColumn {
  Eigen::VectorXd values;
  std::string name;

  NumericColumn() = default;
  NumericColumn(Eigen::VectorXd v, std::string n) : values(std::move(v)), name(std::move(n)) {}

  Eigen::Index size() const { return values.size(); }
};

double sample_mean(const Eigen::VectorXd& v);
double sample_variance(const Eigen::VectorXd& v);  // n-1 divisor
double sample_sd(const Eigen::VectorXd& v);
double sample_covariance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Mean 0, sample variance 1 (n-1 divisor). Throws ZeroVariance when the
// column is constant (variance below 1e-12) and Error on non-finite input
// or length < 3.
NumericColumn standardize(const NumericColumn& col);

// Mean 0 only; variance untouched. Used for product columns whose scale is
// meaningful (e.g. interaction terms of unit-variance bases).
NumericColumn center(const NumericColumn& col);

// Elementwise product of two columns, centered afterwards.
NumericColumn centered_product(const NumericColumn& a, const NumericColumn& b,
                               const std::string& name);

void require_finite(const NumericColumn& col);

}  // namespace causal_tradeoff
