#include "causal_tradeoff/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "causal_tradeoff/errors.hpp"

namespace causal_tradeoff {

Json to_json(const ScenarioSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  j["with_covariates"] = spec.with_covariates;
  Json weights;
  for (const auto& [key, value] : spec.weights) weights[key] = value;
  j["weights"] = weights;
  return j;
}

SpecDocument spec_document_from_json(const Json& j) {
  SpecDocument doc;
  try {
    doc.spec.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    doc.spec.with_covariates = j.value("with_covariates", false);
    for (const auto& [key, value] : j.at("weights").items()) {
      if (!value.is_number()) throw ParseError("weight '" + key + "' is not numeric");
      doc.spec.weights[key] = value.get<double>();
    }
    doc.n = j.value("n", 500);
    doc.seed = j.value("seed", 1ull);
    doc.covariate_count = j.value("n_covariates", 1);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad scenario document: ") + e.what());
  }
  return doc;
}

Json to_json(const ClosedFormResult& r) {
  Json j;
  j["a1"] = r.a1;
  j["a2"] = r.a2;
  j["a3"] = r.a3 ? Json(*r.a3) : Json(nullptr);
  j["a4"] = r.a4;
  j["lambda2"] = r.lambda2;
  j["lambda3"] = r.lambda3 ? Json(*r.lambda3) : Json(nullptr);
  j["lambda4"] = r.lambda4;
  return j;
}

Json to_json(const std::map<std::string, double>& values) {
  Json j;
  for (const auto& [key, value] : values) j[key] = value;
  return j;
}

ExperimentPlan plan_from_json(const Json& j) {
  ExperimentPlan plan;
  const SpecDocument doc = spec_document_from_json(j);
  plan.spec = doc.spec;
  plan.n_per_rep = doc.n;
  plan.seed = doc.seed;
  try {
    plan.replications = j.value("replications", 500);
    if (j.contains("estimators")) {
      plan.estimators.clear();
      for (const auto& name : j.at("estimators")) {
        plan.estimators.push_back(estimator_from_string(name.get<std::string>()));
      }
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad experiment plan: ") + e.what());
  }
  return plan;
}

Json to_json(const ExperimentPlan& plan) {
  Json j = to_json(plan.spec);
  j["n"] = plan.n_per_rep;
  j["seed"] = plan.seed;
  j["replications"] = plan.replications;
  Json est = Json::array();
  for (const auto& e : plan.estimators) est.push_back(to_string(e));
  j["estimators"] = est;
  return j;
}

Json to_json(const SimulationSummary& summary) {
  Json j;
  j["n"] = summary.n_per_rep;
  j["replications"] = summary.replications;
  j["seed"] = summary.seed;
  j["resampled"] = summary.resampled;
  Json rows = Json::array();
  for (const auto& s : summary.estimators) {
    Json row;
    row["estimator"] = to_string(s.estimator);
    row["mean_estimate"] = s.mean_estimate;
    row["mean_inconsistency"] = s.mean_inconsistency;
    row["mc_std_err"] = s.mc_std_err;
    row["closed_form_target"] =
        s.closed_form_target ? Json(*s.closed_form_target) : Json(nullptr);
    row["z_score"] = s.z_score ? Json(*s.z_score) : Json(nullptr);
    rows.push_back(row);
  }
  j["estimators"] = rows;
  j["runtime_seconds"] = summary.runtime_seconds;
  return j;
}

Json to_json(const BenchmarkSet& set) {
  Json j;
  j["kind"] = to_string(set.kind);
  j["oracle"] = set.oracle;
  Json rows = Json::array();
  for (const auto& e : set.entries) {
    Json row;
    row["quantity"] = e.quantity;
    row["value"] = e.value;
    row["maximizer"] = e.maximizer;
    row["per_covariate"] = e.per_covariate;
    row["fallback_unconditional"] = e.fallback_unconditional;
    rows.push_back(row);
  }
  j["entries"] = rows;
  return j;
}

Json to_json(const SensitivityDecomposition& dec) {
  Json j;
  j["kind"] = to_string(dec.kind);
  j["oracle"] = dec.oracle;
  if (dec.kind == ScenarioKind::heterogeneity) {
    j["phi1"] = dec.phi1;
    j["phi2"] = dec.phi2;
    j["gamma1"] = dec.gamma1;
    j["gamma2"] = dec.gamma2;
    j["sign_gate_ratio"] = dec.sign_gate_ratio;
  } else {
    j["phi"] = dec.phi;
  }
  j["gamma_b"] = dec.gamma_b;
  j["theta_b"] = dec.theta_b;
  j["gamma_implied"] = dec.gamma_implied;
  j["theta_implied"] = dec.theta_implied;
  j["benchmarked_violation"] = dec.benchmarked_violation;
  if (dec.kind == ScenarioKind::independence) {
    j["r2_z_w_observed"] = dec.r2_z_w_observed;
  }
  Json stats;
  for (const auto& [key, value] : dec.projection_stats) stats[key] = value;
  j["projection_stats"] = stats;
  j["clamping_events"] = dec.clamping_events;
  return j;
}

namespace {

Json curve_to_json(const std::vector<CurvePoint>& curve) {
  Json arr = Json::array();
  for (const auto& p : curve) arr.push_back(Json::array({p.ir, p.gamma}));
  return arr;
}

}  // namespace

Json to_json(const SensitivityReport& report) {
  Json j;
  j["kind"] = to_string(report.kind);
  j["violation_label"] = report.violation_label;
  j["multipliers"] = report.multipliers;
  j["benchmarked_violation"] = report.benchmarked_violation;
  j["true_ir"] = report.true_ir ? Json(*report.true_ir) : Json(nullptr);
  j["decomposition"] = to_json(report.decomposition);
  Json branches = Json::array();
  for (const auto& br : report.branches) {
    Json b;
    b["sign_case"] = to_string(br.sign_case);
    b["gamma_implied"] = br.gamma_implied;
    b["ir_per_multiplier"] = br.ir_per_multiplier;
    b["required_violation_per_multiplier"] = br.required_violation_per_multiplier;
    b["ir_curve"] = curve_to_json(br.ir_curve);
    Json lines = Json::array();
    for (const auto& line : br.multiplier_lines) lines.push_back(curve_to_json(line));
    b["multiplier_lines"] = lines;
    b["anchor_line"] = curve_to_json(br.anchor_line);
    branches.push_back(b);
  }
  j["branches"] = branches;
  return j;
}

Json to_json(const ContourGrid& grid) {
  Json j;
  j["kind"] = to_string(grid.kind);
  auto axis = [](const GridAxis& a) {
    Json ax;
    ax["name"] = a.name;
    ax["start"] = a.start;
    ax["stop"] = a.stop;
    ax["step"] = a.step;
    ax["values"] = a.values();
    return ax;
  };
  j["strength"] = axis(grid.strength);
  j["violation"] = axis(grid.violation);
  j["feasible_cells"] = grid.feasible_cells;
  auto surface = [](const std::vector<double>& v) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(std::isnan(x) ? Json(nullptr) : Json(x));
    return arr;
  };
  j["lambda2"] = surface(grid.lambda2);
  j["lambda3"] = surface(grid.lambda3);
  j["lambda4"] = surface(grid.lambda4);
  j["winner"] = grid.winner;
  return j;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

Json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_json_text(text);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_or_schema, "cannot write '" + tmp.string() + "'");
    out << text;
  }
  fs::rename(tmp, target);
}

void write_json_atomic(const std::string& path, const Json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace causal_tradeoff
