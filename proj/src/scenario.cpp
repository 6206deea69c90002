#include "causal_tradeoff/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "causal_tradeoff/errors.hpp"
#include "causal_tradeoff/rng.hpp"

namespace causal_tradeoff {

namespace {

constexpr double kMinErrorVariance = 1e-6;

void check_weight_range(const ScenarioSpec& spec) {
  for (const auto& [key, value] : spec.weights) {
    if (!(std::abs(value) < 1.0)) {
      throw Infeasible("weight " + key + " must lie in (-1, 1)");
    }
  }
}

void require_positive(std::map<std::string, double>& vars) {
  for (const auto& [key, value] : vars) {
    if (value < kMinErrorVariance) {
      throw Infeasible("error variance " + key + " = " + std::to_string(value) +
                       " violates the unit-variance constraint");
    }
  }
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::perfect_iv: return "perfect_iv";
    case ScenarioKind::exclusion_restriction: return "exclusion_restriction";
    case ScenarioKind::independence: return "independence";
    case ScenarioKind::heterogeneity: return "heterogeneity";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "perfect_iv") return ScenarioKind::perfect_iv;
  if (s == "exclusion_restriction") return ScenarioKind::exclusion_restriction;
  if (s == "independence") return ScenarioKind::independence;
  if (s == "heterogeneity") return ScenarioKind::heterogeneity;
  throw ParseError("unknown scenario kind '" + s + "'");
}

double ScenarioSpec::weight(const std::string& key) const {
  auto it = weights.find(key);
  if (it == weights.end()) {
    throw ParseError("scenario weight '" + key + "' is required for kind " + to_string(kind));
  }
  return it->second;
}

double ScenarioSpec::weight_or(const std::string& key, double fallback) const {
  auto it = weights.find(key);
  return it == weights.end() ? fallback : it->second;
}

double ScenarioSpec::ace() const {
  return kind == ScenarioKind::heterogeneity ? weight("beta1") : weight("c0");
}

double ClosedFormResult::a3_value() const {
  if (!a3) throw NotDerived("no closed form for the adjust-for-Z estimator in this scenario");
  return *a3;
}

double ClosedFormResult::lambda3_value() const {
  if (!lambda3) throw NotDerived("no closed form for the adjust-for-Z estimator in this scenario");
  return *lambda3;
}

std::map<std::string, double> feasible_error_variances(const ScenarioSpec& spec) {
  check_weight_range(spec);
  std::map<std::string, double> out;
  const bool cov = spec.with_covariates;

  if (spec.kind == ScenarioKind::heterogeneity) {
    const double a1 = spec.weight("alpha1");
    const double a2 = spec.weight("alpha2");
    const double a3 = spec.weight("alpha3");
    const double a4 = cov ? spec.weight("alpha4") : 0.0;
    const double a5 = cov ? spec.weight("alpha5") : 0.0;
    const double b1 = spec.weight("beta1");
    const double b2 = spec.weight("beta2");
    const double b3 = spec.weight("beta3");
    const double b4 = cov ? spec.weight("beta4") : 0.0;
    const double b5 = cov ? spec.weight("beta5") : 0.0;

    out["eps_x"] = 1.0 - a1 * a1 - a2 * a2 - a3 * a3 - a4 * a4 - a5 * a5;
    // Var(XU) = 1 + a2^2 + 2 a3^2 and Var(XW) = 1 + a4^2 + 2 a5^2 under the
    // unit-variance constraint; Cov(XU, XW) = a2 a4 + 2 a3 a5.
    const double var_xu = 1.0 + a2 * a2 + 2.0 * a3 * a3;
    const double var_xw = 1.0 + a4 * a4 + 2.0 * a5 * a5;
    out["eps_y"] = 1.0 -
                   (b1 * b1 + b2 * b2 + b3 * b3 * var_xu + b4 * b4 + b5 * b5 * var_xw +
                    2.0 * b1 * b2 * a2 + 4.0 * b1 * b3 * a1 * a3 + 2.0 * b1 * b4 * a4 +
                    4.0 * b1 * b5 * a1 * a5 + 2.0 * b3 * b5 * (a2 * a4 + 2.0 * a3 * a5));
    require_positive(out);
    return out;
  }

  const double c0 = spec.weight("c0");
  const double c1 = spec.weight("c1");
  const double c2 = spec.weight("c2");
  const double c3 = spec.weight("c3");
  const double c5 = cov ? spec.weight("c5") : 0.0;
  const double c6 = cov ? spec.weight("c6") : 0.0;

  if (spec.kind == ScenarioKind::independence) {
    const double ci = spec.weight("c_i");
    const double c7 = cov ? spec.weight("c7") : 0.0;
    out["eps_z"] = 1.0 - ci * ci - c7 * c7;
    out["eps_x"] = 1.0 - c1 * c1 - c3 * c3 - c5 * c5 - 2.0 * c1 * c3 * ci -
                   2.0 * c3 * c5 * c7;
    const double cov_xu = c1 + c3 * ci;
    const double cov_xw = c5 + c3 * c7;
    out["eps_y"] = 1.0 - c0 * c0 - c2 * c2 - c6 * c6 - 2.0 * c0 * c2 * cov_xu -
                   2.0 * c0 * c6 * cov_xw;
    require_positive(out);
    return out;
  }

  const double cer =
      spec.kind == ScenarioKind::exclusion_restriction ? spec.weight("c_er") : 0.0;
  out["eps_x"] = 1.0 - c1 * c1 - c3 * c3 - c5 * c5;
  out["eps_y"] = 1.0 - c0 * c0 - c2 * c2 - cer * cer - c6 * c6 - 2.0 * c0 * c1 * c2 -
                 2.0 * c0 * c3 * cer - 2.0 * c0 * c5 * c6;
  require_positive(out);
  return out;
}

bool is_feasible(const ScenarioSpec& spec) {
  try {
    feasible_error_variances(spec);
    return true;
  } catch (const Infeasible&) {
    return false;
  }
}

ClosedFormResult closed_form(const ScenarioSpec& spec) {
  feasible_error_variances(spec);  // throws Infeasible on violation
  ClosedFormResult r;
  const bool cov = spec.with_covariates;

  if (spec.kind == ScenarioKind::heterogeneity) {
    const double a1 = spec.weight("alpha1");
    const double a2 = spec.weight("alpha2");
    const double a3 = spec.weight("alpha3");
    const double b1 = spec.weight("beta1");
    const double b2 = spec.weight("beta2");
    const double b3 = spec.weight("beta3");
    r.a1 = b1;
    if (!cov) {
      r.a2 = b1 + a2 * b2 + 2.0 * a1 * a3 * b3;
      r.a3 = b1 + (a2 * b2 + a1 * a3 * b3) / (1.0 - a1 * a1);
      r.a4 = b1 + a3 * b3 / a1;
    } else {
      const double a4 = spec.weight("alpha4");
      const double a5 = spec.weight("alpha5");
      const double var_xw = 1.0 + a4 * a4 + 2.0 * a5 * a5;
      r.a2 = b1 + (a2 * b2 + 2.0 * a1 * a3 * b3) /
                      (1.0 - a4 * a4 - 4.0 * a1 * a1 * a5 * a5 / var_xw);
      const double s = a1 * a1 + a5 * a5;
      r.a4 = b1 + (a1 * a3 * b3 - 2.0 * a1 * a3 * a5 * a5 * b3 / s) /
                      (s - 4.0 * a1 * a1 * a5 * a5 / s);
      // No closed form is derived for the adjust-for-Z estimator here.
      r.a3.reset();
    }
  } else {
    const double c0 = spec.weight("c0");
    const double c1 = spec.weight("c1");
    const double c2 = spec.weight("c2");
    const double c3 = spec.weight("c3");
    const double c5 = cov ? spec.weight("c5") : 0.0;
    r.a1 = c0;
    if (spec.kind == ScenarioKind::independence) {
      const double ci = spec.weight("c_i");
      const double c7 = cov ? spec.weight("c7") : 0.0;
      const double wz = 1.0 - c7 * c7;  // Var(Z) free of W
      r.a2 = c0 + (c1 * c2 + c2 * c3 * ci) / (1.0 - (c5 + c3 * c7) * (c5 + c3 * c7));
      const double num = c1 * c2 * (wz - ci * ci) / wz;
      const double zx = c3 + c1 * ci / wz;
      const double den = 1.0 - (c5 + c3 * c7) * (c5 + c3 * c7) - wz * zx * zx;
      r.a3 = c0 + num / den;
      r.a4 = c0 + c2 * ci / (c3 * wz + c1 * ci);
    } else {
      const double cer =
          spec.kind == ScenarioKind::exclusion_restriction ? spec.weight("c_er") : 0.0;
      r.a2 = c0 + (c1 * c2 + c3 * cer) / (1.0 - c5 * c5);
      r.a3 = c0 + c1 * c2 / (1.0 - c3 * c3 - c5 * c5);
      r.a4 = c0 + cer / c3;
    }
  }

  if (!std::isfinite(r.a4)) {
    throw WeakDenominator("IV estimand undefined: the instrument is irrelevant");
  }
  r.lambda2 = std::abs(r.a2 - r.a1);
  if (r.a3) r.lambda3 = std::abs(*r.a3 - r.a1);
  r.lambda4 = std::abs(r.a4 - r.a1);
  return r;
}

const NumericColumn& GeneratedData::column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return c;
  }
  throw MissingColumn("generated data has no column '" + name + "'");
}

bool GeneratedData::has_column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return true;
  }
  return false;
}

namespace {

Eigen::VectorXd draw(NormalSampler& rng, Eigen::Index n, double sd = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = sd * rng();
  return v;
}

// Restandardized first principal component of iid covariate draws, with the
// largest-magnitude loading made positive. With one covariate this is the
// column itself.
Eigen::VectorXd composite_of(const std::vector<Eigen::VectorXd>& ws, Eigen::Index n) {
  const int J = static_cast<int>(ws.size());
  if (J == 1) return ws[0];
  Eigen::MatrixXd M(n, J);
  for (int j = 0; j < J; ++j) {
    const double m = ws[j].mean();
    const double sd = std::sqrt((ws[j].array() - m).square().sum() / double(n - 1));
    M.col(j) = (ws[j].array() - m) / sd;
  }
  const Eigen::MatrixXd corr = M.transpose() * M / double(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  Eigen::VectorXd loadings = eig.eigenvectors().col(J - 1);  // leading component
  int lead = 0;
  for (int j = 1; j < J; ++j) {
    if (std::abs(loadings[j]) > std::abs(loadings[lead])) lead = j;
  }
  if (loadings[lead] < 0.0) loadings = -loadings;
  Eigen::VectorXd w = M * loadings;
  const double m = w.mean();
  const double sd = std::sqrt((w.array() - m).square().sum() / double(n - 1));
  return (w.array() - m) / sd;
}

}  // namespace

GeneratedData generate(const ScenarioSpec& spec, Eigen::Index n, std::uint64_t seed,
                       const GenerateOptions& options) {
  const auto vars = feasible_error_variances(spec);
  if (n < 10) throw Error(ErrorCode::infeasible_input, "generate requires n >= 10");
  if (options.covariate_count < 1) {
    throw Error(ErrorCode::infeasible_input, "covariate_count must be >= 1");
  }

  NormalSampler rng(seed);
  GeneratedData data;
  data.seed = seed;
  data.n = n;
  const bool cov = spec.with_covariates;

  const Eigen::VectorXd u = draw(rng, n);

  std::vector<Eigen::VectorXd> ws;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (cov) {
    for (int j = 0; j < options.covariate_count; ++j) ws.push_back(draw(rng, n));
    w = composite_of(ws, n);
  }

  Eigen::VectorXd z;
  if (spec.kind == ScenarioKind::independence) {
    const double ci = spec.weight("c_i");
    const double c7 = cov ? spec.weight("c7") : 0.0;
    z = ci * u + c7 * w + draw(rng, n, std::sqrt(vars.at("eps_z")));
  } else {
    z = draw(rng, n);
  }

  Eigen::VectorXd x;
  Eigen::VectorXd y;
  if (spec.kind == ScenarioKind::heterogeneity) {
    const double a1 = spec.weight("alpha1");
    const double a2 = spec.weight("alpha2");
    const double a3 = spec.weight("alpha3");
    const double a4 = cov ? spec.weight("alpha4") : 0.0;
    const double a5 = cov ? spec.weight("alpha5") : 0.0;
    const double b1 = spec.weight("beta1");
    const double b2 = spec.weight("beta2");
    const double b3 = spec.weight("beta3");
    const double b4 = cov ? spec.weight("beta4") : 0.0;
    const double b5 = cov ? spec.weight("beta5") : 0.0;
    const Eigen::VectorXd zu = z.array() * u.array();
    const Eigen::VectorXd zw = z.array() * w.array();
    x = a1 * z + a2 * u + a3 * zu + a4 * w + a5 * zw +
        draw(rng, n, std::sqrt(vars.at("eps_x")));
    const Eigen::VectorXd xu = x.array() * u.array();
    const Eigen::VectorXd xw = x.array() * w.array();
    y = b1 * x + b2 * u + b3 * xu + b4 * w + b5 * xw +
        draw(rng, n, std::sqrt(vars.at("eps_y")));
    data.columns.emplace_back(y, "y");
    data.columns.emplace_back(x, "x");
    data.columns.emplace_back(z, "z");
    data.columns.emplace_back(u, "u");
    data.columns.emplace_back(xu, "xu");
    data.columns.emplace_back(zu, "zu");
    if (cov) {
      data.columns.emplace_back(w, "w");
      data.columns.emplace_back(xw, "xw");
      data.columns.emplace_back(zw, "zw");
    }
  } else {
    const double c0 = spec.weight("c0");
    const double c1 = spec.weight("c1");
    const double c2 = spec.weight("c2");
    const double c3 = spec.weight("c3");
    const double c5 = cov ? spec.weight("c5") : 0.0;
    const double c6 = cov ? spec.weight("c6") : 0.0;
    const double cer =
        spec.kind == ScenarioKind::exclusion_restriction ? spec.weight("c_er") : 0.0;
    x = c1 * u + c3 * z + c5 * w + draw(rng, n, std::sqrt(vars.at("eps_x")));
    y = c0 * x + c2 * u + cer * z + c6 * w + draw(rng, n, std::sqrt(vars.at("eps_y")));
    data.columns.emplace_back(y, "y");
    data.columns.emplace_back(x, "x");
    data.columns.emplace_back(z, "z");
    data.columns.emplace_back(u, "u");
    if (cov) data.columns.emplace_back(w, "w");
  }

  if (cov && options.covariate_count > 1) {
    for (std::size_t j = 0; j < ws.size(); ++j) {
      data.columns.emplace_back(ws[j], "w" + std::to_string(j + 1));
    }
  }
  return data;
}

}  // namespace causal_tradeoff
