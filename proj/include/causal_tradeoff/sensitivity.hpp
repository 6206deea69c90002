#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal_tradeoff/dataset.hpp"
#include "causal_tradeoff/regression.hpp"

namespace causal_tradeoff {

// First principal component of the standardized covariates, restandardized,
// with the largest-magnitude loading made positive.
struct CompositeW {
  NumericColumn column;
  Eigen::VectorXd loadings;
  std::vector<std::string> component_list;
};

CompositeW composite_w(const std::vector<NumericColumn>& covariates);

struct BenchmarkEntry {
  std::string quantity;  // name of the unobserved R2 being stood in for
  double value = 0.0;
  int maximizer = -1;  // covariate index attaining the max, -1 if not a max
  std::vector<double> per_covariate;
  bool fallback_unconditional = false;  // conditioning on W_{-j} dropped (J too small)
};

struct BenchmarkSet {
  ScenarioKind kind = ScenarioKind::exclusion_restriction;
  std::vector<BenchmarkEntry> entries;
  bool oracle = false;  // values are the true latent quantities

  double at(const std::string& quantity) const;
  const BenchmarkEntry& entry(const std::string& quantity) const;
};

// Working columns for one violation kind: standardized bases, the composite
// covariate, and (for heterogeneity) centered product columns.
struct SensitivityFrame {
  ScenarioKind kind;
  NumericColumn y, x, z, w;
  CompositeW composite;
  std::vector<NumericColumn> raw_covariates;
  // heterogeneity products
  NumericColumn xw, zw, xw_hat;
  std::vector<NumericColumn> xwj, zwj;  // per-covariate products
  // oracle columns, present when the latent confounder is exposed
  std::optional<NumericColumn> u, xu, zu;
};

SensitivityFrame make_frame(const Dataset& ds, ScenarioKind kind);

// Observed benchmarks for the unobserved quantities, one entry per table row
// of the kind. Each value is the max over individual covariates of the
// stated partial R2, with per-covariate values retained for audit.
BenchmarkSet benchmark(const SensitivityFrame& frame);

// True values of the same quantities computed from the exposed confounder.
BenchmarkSet oracle_benchmarks(const SensitivityFrame& frame);

enum class SignCase {
  same_sign,            // sign(a2 b2) == sign(a1 a3 b3)
  opposite_strong_main, // signs differ, main effects dominate
  opposite_weak_main,   // signs differ, interaction effects dominate
};

std::string to_string(SignCase c);

struct SensitivityDecomposition {
  ScenarioKind kind;
  bool oracle = false;

  // Exclusion restriction / independence factors.
  double phi = 0.0;
  // Heterogeneity factors.
  double phi1 = 0.0;
  double phi2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;

  double gamma_b = 0.0;  // total benchmarked confounding factor
  double theta_b = 0.0;  // benchmarked violation factor
  double gamma_implied = 0.0;        // gamma solving IR = 1 (same-sign branch)
  double theta_implied = 0.0;        // violation factor solving IR = 1 at M = 1
  double benchmarked_violation = 0.0;  // R2-scale legend value
  double r2_z_w_observed = 0.0;        // independence only
  double sign_gate_ratio = 0.0;        // heterogeneity: gamma / (phi2 theta)

  std::map<std::string, double> projection_stats;
  std::vector<std::string> clamping_events;
};

SensitivityDecomposition decompose(const SensitivityFrame& frame,
                                   const BenchmarkSet& benchmarks);

// Magnitude of the inconsistency ratio at the given confounding multiplier.
// Exclusion restriction: theta phi / (M gamma); independence:
// phi (M gamma) / theta; heterogeneity: branch selected by sign_case.
double inconsistency_ratio(const SensitivityDecomposition& dec, double multiplier,
                           SignCase sign_case = SignCase::same_sign);

struct CurvePoint {
  double ir = 0.0;
  double gamma = 0.0;
};

struct BranchReport {
  SignCase sign_case = SignCase::same_sign;
  double gamma_implied = 0.0;
  std::vector<double> ir_per_multiplier;
  std::vector<double> required_violation_per_multiplier;  // R2 scale
  std::vector<CurvePoint> ir_curve;               // gamma as a function of IR
  std::vector<std::vector<CurvePoint>> multiplier_lines;  // horizontal, at M gamma_b
  std::vector<CurvePoint> anchor_line;            // horizontal, at gamma_implied
};

struct SensitivityReport {
  ScenarioKind kind;
  SensitivityDecomposition decomposition;
  std::vector<double> multipliers;
  double benchmarked_violation = 0.0;
  std::string violation_label;            // legend wording for the kind
  std::vector<BranchReport> branches;     // one, or two for heterogeneity
  std::optional<double> true_ir;          // known-truth runs only
};

SensitivityReport sensitivity_curves(const SensitivityDecomposition& dec,
                                     const std::vector<double>& multipliers);

// Full pipeline: frame, benchmarks (oracle when the dataset exposes u),
// decomposition, curves.
SensitivityReport run_sensitivity(const Dataset& ds, ScenarioKind kind,
                                  const std::vector<double>& multipliers,
                                  bool oracle = false);

}  // namespace causal_tradeoff
