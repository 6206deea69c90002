#include "causal_tradeoff/sensitivity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "causal_tradeoff/errors.hpp"

namespace causal_tradeoff {

namespace {

constexpr double kDenominatorFloor = 1e-10;
constexpr double kR2Ceiling = 1.0 - 1e-12;

double checked_denominator(double value, const std::string& what) {
  if (std::abs(value) < kDenominatorFloor) {
    throw DegenerateDenominator("denominator factor " + what + " is below 1e-10");
  }
  return value;
}

// R2 plug-ins are clamped into [0, 1 - 1e-12]; each clamp is logged.
double clamp_r2(double value, const std::string& what,
                std::vector<std::string>* events) {
  if (value < 0.0 || value > kR2Ceiling) {
    if (events) events->push_back(what + " clamped from " + std::to_string(value));
    return std::clamp(value, 0.0, kR2Ceiling);
  }
  return value;
}

double sd_resid(const NumericColumn& target, const std::vector<NumericColumn>& given) {
  return sample_sd(residualize(target, given).values);
}

double var_resid(const NumericColumn& target, const std::vector<NumericColumn>& given) {
  return sample_variance(residualize(target, given).values);
}

std::vector<NumericColumn> without(const std::vector<NumericColumn>& cols, std::size_t j) {
  std::vector<NumericColumn> out;
  out.reserve(cols.size() - 1);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (k != j) out.push_back(cols[k]);
  }
  return out;
}

std::vector<NumericColumn> cat(std::vector<NumericColumn> a,
                               const std::vector<NumericColumn>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::string to_string(SignCase c) {
  switch (c) {
    case SignCase::same_sign: return "same_sign";
    case SignCase::opposite_strong_main: return "opposite_strong_main";
    case SignCase::opposite_weak_main: return "opposite_weak_main";
  }
  return "unknown";
}

CompositeW composite_w(const std::vector<NumericColumn>& covariates) {
  if (covariates.empty()) {
    throw Error(ErrorCode::infeasible_input, "composite_w requires at least one covariate");
  }
  CompositeW out;
  for (const auto& c : covariates) out.component_list.push_back(c.name);
  const int J = static_cast<int>(covariates.size());
  if (J == 1) {
    out.column = covariates[0];
    out.column.name = "w";
    out.loadings = Eigen::VectorXd::Ones(1);
    return out;
  }
  const Eigen::Index n = covariates[0].size();
  Eigen::MatrixXd M(n, J);
  for (int j = 0; j < J; ++j) {
    if (sample_variance(covariates[j].values) < 1e-12) {
      throw ZeroVariance("covariate '" + covariates[j].name + "' is constant");
    }
    M.col(j) = covariates[j].values;
  }
  const Eigen::MatrixXd corr = M.transpose() * M / double(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  Eigen::VectorXd loadings = eig.eigenvectors().col(J - 1);
  // Sign convention: largest-magnitude loading positive; ties broken by the
  // lowest covariate index.
  int lead = 0;
  for (int j = 1; j < J; ++j) {
    if (std::abs(loadings[j]) > std::abs(loadings[lead]) + 1e-15) lead = j;
  }
  if (loadings[lead] < 0.0) loadings = -loadings;
  out.loadings = loadings;
  NumericColumn raw(M * loadings, "w");
  out.column = standardize(raw);
  return out;
}

SensitivityFrame make_frame(const Dataset& ds, ScenarioKind kind) {
  if (ds.covariates.empty()) {
    throw Error(ErrorCode::infeasible_input,
                "sensitivity analysis requires at least one covariate for benchmarking");
  }
  SensitivityFrame f;
  f.kind = kind;
  f.y = ds.outcome;
  f.x = ds.exposure;
  f.z = ds.instrument;
  f.raw_covariates = ds.covariates;
  f.composite = composite_w(ds.covariates);
  f.w = f.composite.column;

  if (kind == ScenarioKind::heterogeneity) {
    f.xw = centered_product(f.x, f.w, "xw");
    f.zw = centered_product(f.z, f.w, "zw");
    for (const auto& wj : ds.covariates) {
      f.xwj.push_back(centered_product(f.x, wj, "x*" + wj.name));
      f.zwj.push_back(centered_product(f.z, wj, "z*" + wj.name));
    }
    const RegressionFit first = fit_ols(f.xw, {f.z, f.zw, f.w});
    f.xw_hat = NumericColumn(first.fitted, "xw_hat");
  }
  if (ds.has_latent()) {
    f.u = *ds.latent;
    f.xu = centered_product(f.x, *f.u, "xu");
    f.zu = centered_product(f.z, *f.u, "zu");
  }
  return f;
}

double BenchmarkSet::at(const std::string& quantity) const { return entry(quantity).value; }

const BenchmarkEntry& BenchmarkSet::entry(const std::string& quantity) const {
  for (const auto& e : entries) {
    if (e.quantity == quantity) return e;
  }
  throw Error(ErrorCode::io_or_schema, "benchmark set has no entry '" + quantity + "'");
}

namespace {

using Row = std::tuple<NumericColumn, std::vector<NumericColumn>, std::vector<NumericColumn>>;

// One table row: max over covariates j of the stated partial R2, where the
// builder maps j to (target, added, conditioning). When J == 1 and the row
// conditions on the other covariates, the conditioning degenerates to the
// unconditional form and the row is flagged.
template <typename RowBuilder>
BenchmarkEntry max_over_covariates(const std::string& quantity, int J, bool needs_minus_j,
                                   RowBuilder&& row) {
  BenchmarkEntry e;
  e.quantity = quantity;
  e.fallback_unconditional = needs_minus_j && J == 1;
  for (int j = 0; j < J; ++j) {
    const auto [target, added, given] = row(static_cast<std::size_t>(j));
    const double value = partial_r2(target, added, given).value;
    e.per_covariate.push_back(value);
    if (e.maximizer < 0 || value > e.value + 1e-15) {
      e.value = value;
      e.maximizer = j;
    }
  }
  return e;
}

BenchmarkEntry direct_entry(const std::string& quantity, double value) {
  BenchmarkEntry e;
  e.quantity = quantity;
  e.value = value;
  return e;
}

}  // namespace

BenchmarkSet benchmark(const SensitivityFrame& f) {
  BenchmarkSet set;
  set.kind = f.kind;
  const auto& ws = f.raw_covariates;
  const int J = static_cast<int>(ws.size());

  if (f.kind == ScenarioKind::exclusion_restriction) {
    set.entries.push_back(
        direct_entry("r2_y_z_given_xwu", partial_r2(f.y, {f.z}, {f.x, f.w}).value));
    set.entries.push_back(max_over_covariates("r2_x_u", J, false, [&](std::size_t j) -> Row {
      return {f.x, {ws[j]}, {}};
    }));
    set.entries.push_back(
        max_over_covariates("r2_y_u_given_xwz", J, true, [&](std::size_t j) -> Row {
          return {f.y, {ws[j]}, cat({f.x}, cat(without(ws, j), {f.z}))};
        }));
    set.entries.push_back(
        max_over_covariates("r2_u_x_given_wz", J, true, [&](std::size_t j) -> Row {
          return {ws[j], {f.x}, cat(without(ws, j), {f.z})};
        }));
    set.entries.push_back(
        max_over_covariates("r2_y_u_given_xw", J, true, [&](std::size_t j) -> Row {
          return {f.y, {ws[j]}, cat({f.x}, without(ws, j))};
        }));
    return set;
  }

  if (f.kind == ScenarioKind::independence) {
    set.entries.push_back(
        max_over_covariates("r2_x_u_given_zw", J, true, [&](std::size_t j) -> Row {
          return {f.x, {ws[j]}, cat(without(ws, j), {f.z})};
        }));
    set.entries.push_back(max_over_covariates("r2_z_u", J, false, [&](std::size_t j) -> Row {
      return {f.z, {ws[j]}, {}};
    }));
    set.entries.push_back(max_over_covariates("r2_z_w", J, true, [&](std::size_t j) -> Row {
      return {f.z, {ws[j]}, without(ws, j)};
    }));
    return set;
  }

  if (f.kind != ScenarioKind::heterogeneity) {
    throw Error(ErrorCode::io_or_schema, "no benchmark table for this kind");
  }

  set.entries.push_back(max_over_covariates("r2_x_u", J, false, [&](std::size_t j) -> Row {
    return {f.x, {ws[j]}, {}};
  }));
  const auto y_u_row = [&](std::size_t j) -> Row {
    return {f.y, {ws[j]}, cat({f.x}, cat(without(ws, j), {f.xw}))};
  };
  set.entries.push_back(max_over_covariates("r2_y_u_full", J, true, y_u_row));
  set.entries.push_back(max_over_covariates("r2_y_u_reduced", J, true, y_u_row));
  const auto y_xu_row = [&](std::size_t j) -> Row {
    return {f.y, {f.xwj[j]}, cat({f.x, f.w}, without(f.xwj, j))};
  };
  set.entries.push_back(max_over_covariates("r2_y_xu_full", J, true, y_xu_row));
  set.entries.push_back(max_over_covariates("r2_y_xu_reduced", J, true, y_xu_row));
  set.entries.push_back(max_over_covariates("r2_xu_u", J, true, [&](std::size_t j) -> Row {
    return {f.xwj[j], {ws[j]}, cat(without(ws, j), without(f.xwj, j))};
  }));
  {
    // Max over distinct product pairs; with one covariate no counterpart
    // exists, so the factor stays neutral (R2 = 0) and is flagged.
    BenchmarkEntry e;
    e.quantity = "r2_xw_xu";
    e.fallback_unconditional = (J == 1);
    for (int i = 0; i < J; ++i) {
      double best_for_i = 0.0;
      for (int j = 0; j < J; ++j) {
        if (i == j) continue;
        best_for_i = std::max(
            best_for_i, r_squared_of(f.xwj[static_cast<std::size_t>(i)],
                                     {f.xwj[static_cast<std::size_t>(j)]}));
      }
      e.per_covariate.push_back(best_for_i);
      if (J > 1 && (e.maximizer < 0 || best_for_i > e.value + 1e-15)) {
        e.value = best_for_i;
        e.maximizer = i;
      }
    }
    set.entries.push_back(e);
  }
  set.entries.push_back(max_over_covariates("r2_x_zu", J, false, [&](std::size_t j) -> Row {
    return {f.x, {f.zwj[j]}, {}};
  }));
  return set;
}

BenchmarkSet oracle_benchmarks(const SensitivityFrame& f) {
  if (!f.u) {
    throw Error(ErrorCode::infeasible_input,
                "oracle benchmarks require the latent confounder column");
  }
  const NumericColumn& u = *f.u;
  BenchmarkSet set;
  set.kind = f.kind;
  set.oracle = true;

  if (f.kind == ScenarioKind::exclusion_restriction) {
    set.entries = {
        direct_entry("r2_y_z_given_xwu", partial_r2(f.y, {f.z}, {f.x, f.w, u}).value),
        direct_entry("r2_x_u", r_squared_of(f.x, {u})),
        direct_entry("r2_y_u_given_xwz", partial_r2(f.y, {u}, {f.x, f.w, f.z}).value),
        direct_entry("r2_u_x_given_wz", partial_r2(u, {f.x}, {f.w, f.z}).value),
        direct_entry("r2_y_u_given_xw", partial_r2(f.y, {u}, {f.x, f.w}).value),
    };
    return set;
  }
  if (f.kind == ScenarioKind::independence) {
    set.entries = {
        direct_entry("r2_x_u_given_zw", partial_r2(f.x, {u}, {f.z, f.w}).value),
        direct_entry("r2_z_u", r_squared_of(f.z, {u})),
        direct_entry("r2_z_w", r_squared_of(f.z, {f.w})),
    };
    return set;
  }
  const NumericColumn& xu = *f.xu;
  const NumericColumn& zu = *f.zu;
  set.entries = {
      direct_entry("r2_x_u", r_squared_of(f.x, {u})),
      direct_entry("r2_y_u_full", partial_r2(f.y, {u}, {f.x, f.w, xu, f.xw}).value),
      direct_entry("r2_y_u_reduced", partial_r2(f.y, {u}, {f.x, f.w, f.xw}).value),
      direct_entry("r2_y_xu_full", partial_r2(f.y, {xu}, {f.x, f.w, u, f.xw}).value),
      direct_entry("r2_y_xu_reduced", partial_r2(f.y, {xu}, {f.x, f.w, f.xw}).value),
      direct_entry("r2_xu_u", partial_r2(xu, {u}, {f.w, f.xw}).value),
      direct_entry("r2_xw_xu", r_squared_of(f.xw, {xu})),
      direct_entry("r2_x_zu", r_squared_of(f.x, {zu})),
  };
  return set;
}

namespace {

void decompose_exclusion(const SensitivityFrame& f, const BenchmarkSet& b,
                         SensitivityDecomposition& d) {
  const double r2_xwz = r_squared_of(f.x, {f.w, f.z});
  const double pr_y_z_xw = clamp_r2(partial_r2(f.y, {f.z}, {f.x, f.w}).value,
                                    "r2_y_z_given_xw", &d.clamping_events);
  const double r2_xz = clamp_r2(r_squared_of(f.x, {f.z}), "r2_x_z", &d.clamping_events);
  // The observed Z residual scale stands in for its latent-conditioned
  // counterpart; oracle mode uses the real one.
  const double sd_z = d.oracle ? sd_resid(f.z, {f.x, f.w, *f.u}) : sd_resid(f.z, {f.x, f.w});
  d.projection_stats["sd_z_perp_xw"] = sd_resid(f.z, {f.x, f.w});
  if (d.oracle) d.projection_stats["sd_z_perp_xwu"] = sd_z;

  checked_denominator(r2_xz, "r2_x_z");
  checked_denominator(sd_z * sd_z, "var(z_perp)");
  checked_denominator(1.0 - pr_y_z_xw, "1-r2_y_z_given_xw");
  d.phi = (1.0 - r2_xwz) / (std::sqrt(1.0 - pr_y_z_xw) * std::sqrt(r2_xz) * sd_z);

  const double b_xu = clamp_r2(b.at("r2_x_u"), "r2_x_u", &d.clamping_events);
  const double b_yu_xwz =
      clamp_r2(b.at("r2_y_u_given_xwz"), "r2_y_u_given_xwz", &d.clamping_events);
  const double b_ux_wz =
      clamp_r2(b.at("r2_u_x_given_wz"), "r2_u_x_given_wz", &d.clamping_events);
  const double b_yu_xw =
      clamp_r2(b.at("r2_y_u_given_xw"), "r2_y_u_given_xw", &d.clamping_events);
  d.gamma_b = std::sqrt(b_xu) * std::sqrt(b_yu_xwz) /
              checked_denominator(std::sqrt(1.0 - b_ux_wz) * std::sqrt(1.0 - b_yu_xw),
                                  "sqrt(1-r2_u_x_wz)*sqrt(1-r2_y_u_xw)");
  d.theta_b = std::sqrt(
      clamp_r2(b.at("r2_y_z_given_xwu"), "r2_y_z_given_xwu", &d.clamping_events));
  d.benchmarked_violation = b.at("r2_y_z_given_xwu");
  d.gamma_implied = d.theta_b * d.phi;
  d.theta_implied = std::pow(d.gamma_b / d.phi, 2.0);
}

void decompose_independence(const SensitivityFrame& f, const BenchmarkSet& b,
                            SensitivityDecomposition& d) {
  const double pr_x_z_w =
      clamp_r2(partial_r2(f.x, {f.z}, {f.w}).value, "r2_x_z_given_w", &d.clamping_events);
  const double sd_x_w = sd_resid(f.x, {f.w});
  const double sd_z_w = sd_resid(f.z, {f.w});
  const double sd_x_zw = sd_resid(f.x, {f.z, f.w});
  d.projection_stats["sd_x_perp_zw"] = sd_x_zw;
  d.projection_stats["sd_x_perp_w"] = sd_x_w;
  d.projection_stats["sd_z_perp_w"] = sd_z_w;

  // Denominator expressed as the residual variance of X given Z and W, which
  // is what the factored display reduces to.
  checked_denominator(sd_x_zw * sd_x_zw, "var(x_perp_zw)");
  d.phi = std::sqrt(pr_x_z_w) * sd_x_w * sd_z_w / sd_x_zw;

  d.gamma_b =
      std::sqrt(clamp_r2(b.at("r2_x_u_given_zw"), "r2_x_u_given_zw", &d.clamping_events));
  const double b_zu = clamp_r2(b.at("r2_z_u"), "r2_z_u", &d.clamping_events);
  const double b_zw = clamp_r2(b.at("r2_z_w"), "r2_z_w", &d.clamping_events);
  const double remaining = checked_denominator(1.0 - b_zw - b_zu, "1-r2_z_w-r2_z_u");
  d.theta_b = std::sqrt(b_zu) * std::sqrt(1.0 - b_zw) / std::sqrt(remaining);
  d.benchmarked_violation = b_zu;
  d.r2_z_w_observed = r_squared_of(f.z, {f.w});
  d.gamma_implied = d.theta_b / checked_denominator(d.phi, "phi");
  const double pg = d.phi * d.gamma_b;
  d.theta_implied =
      pg * pg * (1.0 - d.r2_z_w_observed) / ((1.0 - d.r2_z_w_observed) + pg * pg);
}

void decompose_heterogeneity(const SensitivityFrame& f, const BenchmarkSet& b,
                             SensitivityDecomposition& d) {
  const double r2_xz = clamp_r2(r_squared_of(f.x, {f.z}), "r2_x_z", &d.clamping_events);
  const double r2_xzw = clamp_r2(r_squared_of(f.x, {f.zw}), "r2_x_zw", &d.clamping_events);
  const double var_hat = sample_variance(f.xw_hat.values);
  const double var_x_perp = var_resid(f.x, {f.w, f.xw});
  const double cov_x_xw = sample_covariance(f.x.values, f.xw.values);
  d.projection_stats["var_x_perp_w_xw"] = var_x_perp;
  d.projection_stats["var_xw_hat"] = var_hat;

  checked_denominator(var_hat, "var(xw_hat)");
  const double denom =
      checked_denominator(r2_xz + r2_xzw - cov_x_xw * cov_x_xw / var_hat,
                          "r2_x_z + r2_x_zw - cov(x,xw)^2/var(xw_hat)");
  d.phi1 = std::abs(0.5 - r2_xzw / var_hat) * var_x_perp / std::abs(denom);
  d.phi2 = 2.0 * std::sqrt(r2_xz);
  d.theta_b = std::sqrt(clamp_r2(b.at("r2_x_zu"), "r2_x_zu", &d.clamping_events));
  d.benchmarked_violation = b.at("r2_x_zu");

  if (d.oracle) {
    // Exact counterparts of the benchmarked factors: gamma1 estimates the
    // latent main-effect product |a2 b2| and gamma2 estimates 1/|b3|.
    const NumericColumn& u = *f.u;
    const NumericColumn& xu = *f.xu;
    d.gamma1 = std::sqrt(r_squared_of(f.x, {u})) *
               std::sqrt(partial_r2(f.y, {u}, {f.x, f.w, xu, f.xw}).value) *
               sd_resid(f.y, {f.x, f.w, xu, f.xw}) /
               checked_denominator(sd_resid(u, {f.x, f.w, xu, f.xw}), "sd(u_perp)");
    d.gamma2 = sd_resid(xu, {f.x, f.w, u, f.xw}) /
               checked_denominator(
                   std::sqrt(partial_r2(f.y, {xu}, {f.x, f.w, u, f.xw}).value) *
                       sd_resid(f.y, {f.x, f.w, u, f.xw}),
                   "sqrt(r2_y_xu_full)*sd(y_perp)");
  } else {
    const double b_xu = clamp_r2(b.at("r2_x_u"), "r2_x_u", &d.clamping_events);
    const double b_yu = clamp_r2(b.at("r2_y_u_full"), "r2_y_u_full", &d.clamping_events);
    const double b_yu_red =
        clamp_r2(b.at("r2_y_u_reduced"), "r2_y_u_reduced", &d.clamping_events);
    d.gamma1 = std::sqrt(b_xu) * std::sqrt(b_yu) /
               checked_denominator(std::sqrt(1.0 - b_yu_red) * std::sqrt(1.0 - b_xu),
                                   "sqrt(1-r2_y_u_reduced)*sqrt(1-r2_x_u)");
    const double b_yxu = clamp_r2(b.at("r2_y_xu_full"), "r2_y_xu_full", &d.clamping_events);
    const double b_yxu_red =
        clamp_r2(b.at("r2_y_xu_reduced"), "r2_y_xu_reduced", &d.clamping_events);
    const double b_xuu = clamp_r2(b.at("r2_xu_u"), "r2_xu_u", &d.clamping_events);
    const double b_xwxu = clamp_r2(b.at("r2_xw_xu"), "r2_xw_xu", &d.clamping_events);
    d.gamma2 = std::sqrt(1.0 - b_yxu_red) * std::sqrt(1.0 - b_xuu) *
               std::sqrt(1.0 - b_xwxu) /
               checked_denominator(std::sqrt(b_yxu), "sqrt(r2_y_xu_full)");
  }
  d.gamma_b = d.gamma1 * d.gamma2;
  d.sign_gate_ratio = d.gamma_b / checked_denominator(d.phi2 * d.theta_b, "phi2*theta");
  d.gamma_implied = (d.phi1 - 1.0) * d.phi2 * d.theta_b;
  const double branch1 = checked_denominator((d.phi1 - 1.0) * d.phi2, "(phi1-1)*phi2");
  d.theta_implied = std::pow(d.gamma_b / branch1, 2.0);
}

}  // namespace

SensitivityDecomposition decompose(const SensitivityFrame& frame,
                                   const BenchmarkSet& benchmarks) {
  if (benchmarks.kind != frame.kind) {
    throw Error(ErrorCode::io_or_schema, "benchmark set was computed for a different kind");
  }
  SensitivityDecomposition d;
  d.kind = frame.kind;
  d.oracle = benchmarks.oracle;
  if (d.oracle && !frame.u) {
    throw Error(ErrorCode::infeasible_input, "oracle decomposition needs the latent column");
  }
  switch (frame.kind) {
    case ScenarioKind::exclusion_restriction:
      decompose_exclusion(frame, benchmarks, d);
      break;
    case ScenarioKind::independence:
      decompose_independence(frame, benchmarks, d);
      break;
    case ScenarioKind::heterogeneity:
      decompose_heterogeneity(frame, benchmarks, d);
      break;
    case ScenarioKind::perfect_iv:
      throw Error(ErrorCode::io_or_schema,
                  "sensitivity analysis applies to the violation kinds only");
  }
  return d;
}

double inconsistency_ratio(const SensitivityDecomposition& dec, double multiplier,
                           SignCase sign_case) {
  if (!(multiplier > 0.0)) {
    throw Error(ErrorCode::infeasible_input, "multiplier must be positive");
  }
  switch (dec.kind) {
    case ScenarioKind::exclusion_restriction:
      return dec.theta_b * dec.phi / checked_denominator(multiplier * dec.gamma_b, "M*gamma");
    case ScenarioKind::independence:
      return dec.phi * multiplier * dec.gamma_b / checked_denominator(dec.theta_b, "theta");
    case ScenarioKind::heterogeneity: {
      const double shift = sign_case == SignCase::opposite_strong_main ? 1.0 : -1.0;
      const double value =
          (dec.phi1 + shift) * dec.phi2 * dec.theta_b /
          checked_denominator(multiplier * dec.gamma1 * dec.gamma2, "M*gamma1*gamma2");
      return std::abs(value);
    }
    case ScenarioKind::perfect_iv: break;
  }
  throw Error(ErrorCode::io_or_schema, "no inconsistency ratio for this kind");
}

namespace {

std::vector<CurvePoint> horizontal_line(double gamma, double ir_max) {
  return {{0.0, gamma}, {ir_max, gamma}};
}

BranchReport make_branch(const SensitivityDecomposition& dec, SignCase sign_case,
                         const std::vector<double>& multipliers) {
  BranchReport br;
  br.sign_case = sign_case;
  for (const double m : multipliers) {
    br.ir_per_multiplier.push_back(inconsistency_ratio(dec, m, sign_case));
  }

  const double shift = sign_case == SignCase::opposite_strong_main ? 1.0 : -1.0;
  double implied = 0.0;
  switch (dec.kind) {
    case ScenarioKind::exclusion_restriction:
      implied = dec.gamma_implied;
      for (const double m : multipliers) {
        br.required_violation_per_multiplier.push_back(
            std::pow(m * dec.gamma_b / dec.phi, 2.0));
      }
      break;
    case ScenarioKind::independence:
      implied = dec.gamma_implied;
      for (const double m : multipliers) {
        const double pg = dec.phi * m * dec.gamma_b;
        br.required_violation_per_multiplier.push_back(
            pg * pg * (1.0 - dec.r2_z_w_observed) /
            ((1.0 - dec.r2_z_w_observed) + pg * pg));
      }
      break;
    case ScenarioKind::heterogeneity: {
      implied = std::abs((dec.phi1 + shift) * dec.phi2 * dec.theta_b);
      const double scale =
          checked_denominator((dec.phi1 + shift) * dec.phi2, "(phi1+-1)*phi2");
      for (const double m : multipliers) {
        br.required_violation_per_multiplier.push_back(
            std::pow(m * dec.gamma_b / scale, 2.0));
      }
      break;
    }
    case ScenarioKind::perfect_iv: break;
  }
  br.gamma_implied = implied;

  double ir_max = 1.5;
  for (const double ir : br.ir_per_multiplier) ir_max = std::max(ir_max, 1.25 * ir);

  const int kSamples = 101;
  if (dec.kind == ScenarioKind::independence) {
    // Confounding grows linearly with the ratio here.
    const double slope = dec.theta_b / dec.phi;
    for (int i = 0; i < kSamples; ++i) {
      const double ir = ir_max * double(i) / double(kSamples - 1);
      br.ir_curve.push_back({ir, slope * ir});
    }
  } else {
    const double k = dec.kind == ScenarioKind::exclusion_restriction
                         ? dec.theta_b * dec.phi
                         : std::abs((dec.phi1 + shift) * dec.phi2 * dec.theta_b);
    const double ir_min = ir_max / 50.0;
    for (int i = 0; i < kSamples; ++i) {
      const double ir = ir_min + (ir_max - ir_min) * double(i) / double(kSamples - 1);
      br.ir_curve.push_back({ir, k / ir});
    }
  }
  for (const double m : multipliers) {
    br.multiplier_lines.push_back(horizontal_line(m * dec.gamma_b, ir_max));
  }
  br.anchor_line = horizontal_line(implied, ir_max);
  return br;
}

}  // namespace

SensitivityReport sensitivity_curves(const SensitivityDecomposition& dec,
                                     const std::vector<double>& multipliers) {
  SensitivityReport report;
  report.kind = dec.kind;
  report.decomposition = dec;
  report.multipliers = multipliers;
  report.benchmarked_violation = dec.benchmarked_violation;
  switch (dec.kind) {
    case ScenarioKind::exclusion_restriction:
      report.violation_label = "ER Violation";
      report.branches.push_back(make_branch(dec, SignCase::same_sign, multipliers));
      break;
    case ScenarioKind::independence:
      report.violation_label = "U-Z";
      report.branches.push_back(make_branch(dec, SignCase::same_sign, multipliers));
      break;
    case ScenarioKind::heterogeneity: {
      report.violation_label = "X-ZU";
      report.branches.push_back(make_branch(dec, SignCase::same_sign, multipliers));
      // Signs of the latent coefficients are unknowable, so the opposite-sign
      // branch is always reported alongside; the gate ratio picks which
      // opposite-sign form applies.
      const SignCase second = dec.sign_gate_ratio > 1.0 ? SignCase::opposite_strong_main
                                                        : SignCase::opposite_weak_main;
      report.branches.push_back(make_branch(dec, second, multipliers));
      break;
    }
    case ScenarioKind::perfect_iv:
      throw Error(ErrorCode::io_or_schema,
                  "sensitivity analysis applies to the violation kinds only");
  }
  return report;
}

SensitivityReport run_sensitivity(const Dataset& ds, ScenarioKind kind,
                                  const std::vector<double>& multipliers, bool oracle) {
  const SensitivityFrame frame = make_frame(ds, kind);
  const BenchmarkSet b = oracle ? oracle_benchmarks(frame) : benchmark(frame);
  const SensitivityDecomposition dec = decompose(frame, b);
  return sensitivity_curves(dec, multipliers);
}

}  // namespace causal_tradeoff
