#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causal_tradeoff/scenario.hpp"

namespace causal_tradeoff {

enum class Estimator { ols_without_z, ols_with_z, tsls_with_z };

std::string to_string(Estimator e);
Estimator estimator_from_string(const std::string& s);

struct ExperimentPlan {
  ScenarioSpec spec;
  Eigen::Index n_per_rep = 500;
  int replications = 500;
  std::uint64_t seed = 1;
  std::vector<Estimator> estimators = {Estimator::ols_without_z, Estimator::ols_with_z,
                                       Estimator::tsls_with_z};
};

struct EstimatorSummary {
  Estimator estimator = Estimator::ols_without_z;
  double mean_estimate = 0.0;       // mean of the signed coefficient estimates
  double mean_inconsistency = 0.0;  // |mean_estimate - causal effect|
  double mc_std_err = 0.0;          // sd of the estimates / sqrt(replications)
  std::optional<double> closed_form_target;  // lambda for this estimator
  std::optional<double> z_score;  // (mean_inconsistency - target) / mc_std_err
};

struct SimulationSummary {
  std::vector<EstimatorSummary> estimators;
  Eigen::Index n_per_rep = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  int resampled = 0;  // replications redrawn after a numerical failure
  double runtime_seconds = 0.0;
};

// Fits the requested estimators on `replications` generated datasets and
// aggregates. Replications run on a worker pool (capped by the
// CAUSAL_TRADEOFF_THREADS environment variable) but are aggregated in
// replication order, so results are identical however they are scheduled.
// A replication that fails numerically is redrawn with a fresh derived
// seed; more than 1% of replications failing is an error.
SimulationSummary run(const ExperimentPlan& plan);

// One summary per sample size, with independent seeds derived per run.
std::vector<SimulationSummary> convergence_scan(const ScenarioSpec& spec,
                                                const std::vector<Eigen::Index>& n_grid,
                                                int replications, std::uint64_t seed);

// Aligned closed-form vs simulated table.
std::string to_text_table(const SimulationSummary& summary);

// Point estimate of one estimator on one generated dataset (centered
// columns). Exposed for tests and the oracle tooling.
double estimate_on(const GeneratedData& data, const ScenarioSpec& spec, Estimator which);

int worker_count();

}  // namespace causal_tradeoff
