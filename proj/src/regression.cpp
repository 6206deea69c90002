#include "causal_tradeoff/regression.hpp"

#include <algorithm>
#include <cmath>

namespace causal_tradeoff {

namespace {

constexpr double kConditionLimit = 1e10;
constexpr double kMaxF = 1e15;

void require_centered(const NumericColumn& col) {
  const double scale = std::max(1.0, col.values.cwiseAbs().maxCoeff());
  if (std::abs(col.values.mean()) > 1e-8 * scale) {
    throw Error(ErrorCode::infeasible_input,
                "column '" + col.name + "' is not centered; standardize inputs first");
  }
}

Eigen::MatrixXd design_matrix(const std::vector<NumericColumn>& cols, Eigen::Index n) {
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != n) {
      throw Error(ErrorCode::io_or_schema, "column '" + cols[j].name + "' length mismatch");
    }
    require_finite(cols[j]);
    require_centered(cols[j]);
    X.col(static_cast<Eigen::Index>(j)) = cols[j].values;
  }
  return X;
}

std::vector<std::string> names_of(const std::vector<NumericColumn>& cols) {
  std::vector<std::string> out;
  out.reserve(cols.size());
  for (const auto& c : cols) out.push_back(c.name);
  return out;
}

double condition_estimate(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                          Eigen::Index p) {
  const auto& R = qr.matrixR();
  double dmax = 0.0;
  double dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < p; ++k) {
    const double d = std::abs(R(k, k));
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  if (dmin == 0.0) return std::numeric_limits<double>::infinity();
  return dmax / dmin;
}

}  // namespace

RegressionFit fit_ols(const NumericColumn& y, const std::vector<NumericColumn>& X) {
  const Eigen::Index n = y.size();
  require_finite(y);
  require_centered(y);
  if (X.empty()) {
    throw Error(ErrorCode::io_or_schema, "fit_ols requires at least one regressor");
  }
  const Eigen::MatrixXd M = design_matrix(X, n);
  const Eigen::Index p = M.cols();
  if (n <= p) {
    throw Error(ErrorCode::infeasible_input, "fit_ols needs more rows than regressors");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < p || condition_estimate(qr, p) > kConditionLimit) {
    throw Collinear("regressor matrix is numerically singular (condition estimate > 1e10)");
  }

  RegressionFit fit;
  fit.coefficients = qr.solve(y.values);
  fit.fitted = M * fit.coefficients;
  fit.residuals = y.values - fit.fitted;
  const double sst = y.values.squaredNorm();
  const double ssr = fit.residuals.squaredNorm();
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 0.0;
  fit.n = n;
  fit.regressor_names = names_of(X);
  return fit;
}

NumericColumn residualize(const NumericColumn& target, const std::vector<NumericColumn>& Z) {
  if (Z.empty()) return target;
  const Eigen::Index n = target.size();
  require_finite(target);
  const Eigen::MatrixXd M = design_matrix(Z, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() == M.cols() && condition_estimate(qr, M.cols()) > kConditionLimit) {
    throw Collinear("conditioning set is numerically singular");
  }
  NumericColumn out;
  out.name = target.name + "_perp";
  out.values = target.values - M * qr.solve(target.values);
  return out;
}

double r_squared_of(const NumericColumn& y, const std::vector<NumericColumn>& X) {
  if (X.empty()) return 0.0;
  const Eigen::Index n = y.size();
  const Eigen::MatrixXd M = design_matrix(X, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  const Eigen::VectorXd resid = y.values - M * qr.solve(y.values);
  const double sst = y.values.squaredNorm();
  if (sst <= 0.0) throw ZeroVariance("target '" + y.name + "' has zero variance");
  return std::clamp(1.0 - resid.squaredNorm() / sst, 0.0, 1.0);
}

PartialR2 partial_r2(const NumericColumn& y, const std::vector<NumericColumn>& added,
                     const std::vector<NumericColumn>& given) {
  require_finite(y);
  require_centered(y);
  const double r2_reduced = r_squared_of(y, given);
  std::vector<NumericColumn> full = given;
  full.insert(full.end(), added.begin(), added.end());
  const double r2_full = r_squared_of(y, full);

  PartialR2 out;
  out.target = y.name;
  out.added_regressors = names_of(added);
  out.conditioning_set = names_of(given);
  const double denom = 1.0 - r2_reduced;
  if (denom < 1e-12) {
    throw DegenerateDenominator("conditioning set already explains target '" + y.name + "'");
  }
  out.value = std::clamp((r2_full - r2_reduced) / denom, 0.0, 1.0);
  return out;
}

double first_stage_f(const NumericColumn& endogenous,
                     const std::vector<NumericColumn>& instruments,
                     const std::vector<NumericColumn>& exogenous) {
  if (instruments.empty()) {
    throw Error(ErrorCode::io_or_schema, "first_stage_f requires at least one instrument");
  }
  std::vector<NumericColumn> full = instruments;
  full.insert(full.end(), exogenous.begin(), exogenous.end());
  const double r2_full = r_squared_of(endogenous, full);
  const double r2_reduced = r_squared_of(endogenous, exogenous);
  const double q = static_cast<double>(instruments.size());
  const double df =
      static_cast<double>(endogenous.size()) - static_cast<double>(full.size()) - 1.0;
  if (df <= 0.0) throw Error(ErrorCode::infeasible_input, "not enough rows for an F statistic");
  const double unexplained = 1.0 - r2_full;
  if (unexplained < 1e-15) return kMaxF;
  const double f = ((r2_full - r2_reduced) / q) / (unexplained / df);
  return std::min(std::max(f, 0.0), kMaxF);
}

TslsFit fit_2sls(const NumericColumn& y, const std::vector<NumericColumn>& endogenous,
                 const std::vector<NumericColumn>& instruments,
                 const std::vector<NumericColumn>& exogenous) {
  if (endogenous.empty()) {
    throw Error(ErrorCode::io_or_schema, "fit_2sls requires an endogenous column");
  }
  if (instruments.size() < endogenous.size()) {
    throw RankDeficient("fewer instruments than endogenous columns");
  }

  std::vector<NumericColumn> first_stage = instruments;
  first_stage.insert(first_stage.end(), exogenous.begin(), exogenous.end());

  TslsFit out;
  std::vector<NumericColumn> second_stage;
  second_stage.reserve(endogenous.size() + exogenous.size());
  for (const auto& endo : endogenous) {
    RegressionFit fs = fit_ols(endo, first_stage);
    NumericColumn fitted(fs.fitted, endo.name + "_hat");
    if (sample_variance(fitted.values) < 1e-10) {
      throw WeakDenominator("first-stage fitted values for '" + endo.name +
                            "' are numerically constant (irrelevant instruments)");
    }
    second_stage.push_back(std::move(fitted));
    out.first_stage_f.push_back(first_stage_f(endo, instruments, exogenous));
  }
  second_stage.insert(second_stage.end(), exogenous.begin(), exogenous.end());

  const RegressionFit ss = fit_ols(y, second_stage);
  out.coefficients = ss.coefficients;
  out.regressor_names = ss.regressor_names;
  out.weak_instrument =
      std::any_of(out.first_stage_f.begin(), out.first_stage_f.end(),
                  [](double f) { return f < 10.0; });

  if (endogenous.size() == 1 && instruments.size() == 1 && exogenous.empty()) {
    const double cxz = sample_covariance(endogenous[0].values, instruments[0].values);
    if (std::abs(cxz) < 1e-10) {
      throw WeakDenominator("instrument '" + instruments[0].name +
                            "' is uncorrelated with the exposure");
    }
    out.wald_ratio = sample_covariance(y.values, instruments[0].values) / cxz;
  }
  return out;
}

}  // namespace causal_tradeoff
