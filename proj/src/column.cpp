#include "causal_tradeoff/column.hpp"

#include <cmath>

namespace causal_tradeoff {

double sample_mean(const Eigen::VectorXd& v) { return v.mean(); }

double sample_variance(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

double sample_sd(const Eigen::VectorXd& v) { return std::sqrt(sample_variance(v)); }

double sample_covariance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  return ((a.array() - ma) * (b.array() - mb)).sum() / static_cast<double>(a.size() - 1);
}

void require_finite(const NumericColumn& col) {
  if (!col.values.allFinite()) {
    throw NonNumeric("column '" + col.name + "' contains non-finite values");
  }
}

NumericColumn standardize(const NumericColumn& col) {
  if (col.size() < 3) {
    throw Error(ErrorCode::infeasible_input,
                "column '" + col.name + "' has fewer than 3 observations");
  }
  require_finite(col);
  const double m = col.values.mean();
  const double var = sample_variance(col.values);
  if (var < 1e-12) {
    throw ZeroVariance("column '" + col.name + "' has near-zero sample variance");
  }
  const double sd = std::sqrt(var);
  NumericColumn out;
  out.name = col.name;
  out.values = (col.values.array() - m) / sd;
  return out;
}

NumericColumn center(const NumericColumn& col) {
  require_finite(col);
  NumericColumn out;
  out.name = col.name;
  out.values = col.values.array() - col.values.mean();
  return out;
}

NumericColumn centered_product(const NumericColumn& a, const NumericColumn& b,
                               const std::string& name) {
  NumericColumn prod;
  prod.name = name;
  prod.values = a.values.array() * b.values.array();
  return center(prod);
}

}  // namespace causal_tradeoff
