#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "causal_tradeoff/contour.hpp"
#include "causal_tradeoff/montecarlo.hpp"
#include "causal_tradeoff/sensitivity.hpp"

// JSON wire formats. Field order is stable (insertion order preserved), so
// output is byte-reproducible for a fixed seed.
//
// ScenarioSpec: {"kind": "...", "with_covariates": bool,
//                "weights": {"c0": 0.3, ...}, "n": int, "seed": int}
// ExperimentPlan adds "replications" and optional "estimators".

namespace causal_tradeoff {

using Json = nlohmann::ordered_json;

struct SpecDocument {
  ScenarioSpec spec;
  Eigen::Index n = 500;
  std::uint64_t seed = 1;
  int covariate_count = 1;
};

Json to_json(const ScenarioSpec& spec);
SpecDocument spec_document_from_json(const Json& j);

Json to_json(const ClosedFormResult& r);
Json to_json(const std::map<std::string, double>& values);

ExperimentPlan plan_from_json(const Json& j);
Json to_json(const ExperimentPlan& plan);
Json to_json(const SimulationSummary& summary);

Json to_json(const BenchmarkSet& set);
Json to_json(const SensitivityDecomposition& dec);
Json to_json(const SensitivityReport& report);

Json to_json(const ContourGrid& grid);

Json parse_json_file(const std::string& path);
Json parse_json_text(const std::string& text);

// write-temp-then-rename
void write_text_atomic(const std::string& path, const std::string& text);
void write_json_atomic(const std::string& path, const Json& j);

}  // namespace causal_tradeoff
