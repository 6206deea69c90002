#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "causal_tradeoff/csv.hpp"
#include "causal_tradeoff/errors.hpp"
#include "causal_tradeoff/json_io.hpp"
#include "causal_tradeoff/montecarlo.hpp"
#include "causal_tradeoff/svg.hpp"

namespace ct = causal_tradeoff;
namespace fs = std::filesystem;

namespace {

struct SensitivityArgs {
  std::string spec_path;
  std::string data_path;
  std::string roles_text;
  std::string config_path;
  std::string out_dir;
  std::vector<double> multipliers = {0.5, 1.0, 1.5};
  std::vector<std::string> kinds;
  std::uint64_t seed = 0;  // 0 = keep the spec document's seed
  bool expose_u = false;
};

void emit(const ct::Json& j, const std::string& out_dir, const std::string& name) {
  if (out_dir.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    ct::write_json_atomic((fs::path(out_dir) / name).string(), j);
  }
}

double true_ir_of(const ct::ScenarioSpec& spec) {
  const ct::ClosedFormResult cf = ct::closed_form(spec);
  if (spec.kind == ct::ScenarioKind::heterogeneity) {
    return cf.lambda4 / cf.lambda2;
  }
  return cf.lambda4 / cf.lambda3_value();
}

int cmd_closed_form(const std::string& spec_path, const std::string& out_dir) {
  const ct::SpecDocument doc = ct::spec_document_from_json(ct::parse_json_file(spec_path));
  const ct::ClosedFormResult cf = ct::closed_form(doc.spec);
  ct::Json j = ct::to_json(cf);
  j["error_variances"] = ct::to_json(ct::feasible_error_variances(doc.spec));
  emit(j, out_dir, "closed_form.json");
  return 0;
}

int cmd_simulate(const std::string& plan_path, const std::string& out_dir) {
  const ct::ExperimentPlan plan = ct::plan_from_json(ct::parse_json_file(plan_path));
  const ct::SimulationSummary summary = ct::run(plan);
  const std::string table = ct::to_text_table(summary);
  emit(ct::to_json(summary), out_dir, "report.json");
  if (out_dir.empty()) {
    std::cout << table;
  } else {
    ct::write_text_atomic((fs::path(out_dir) / "summary.txt").string(), table);
  }
  return 0;
}

std::vector<ct::ScenarioKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<ct::ScenarioKind> kinds;
  for (const auto& name : names) kinds.push_back(ct::scenario_kind_from_string(name));
  return kinds;
}

int cmd_sensitivity(SensitivityArgs args) {
  if (!args.config_path.empty()) {
    const ct::Json cfg = ct::parse_json_file(args.config_path);
    if (args.data_path.empty()) args.data_path = cfg.value("data", "");
    if (args.spec_path.empty()) args.spec_path = cfg.value("spec", "");
    if (args.roles_text.empty()) args.roles_text = cfg.value("roles", "");
    if (args.out_dir.empty()) args.out_dir = cfg.value("out", "");
    if (cfg.contains("multipliers")) {
      args.multipliers = cfg.at("multipliers").get<std::vector<double>>();
    }
    if (cfg.contains("kinds") && args.kinds.empty()) {
      args.kinds = cfg.at("kinds").get<std::vector<std::string>>();
    }
    if (cfg.contains("seed") && args.seed == 0) {
      args.seed = cfg.at("seed").get<std::uint64_t>();
    }
    if (cfg.value("expose_u", false)) args.expose_u = true;
  }

  ct::Dataset dataset;
  std::vector<ct::ScenarioKind> kinds;
  std::optional<ct::ScenarioSpec> truth;
  if (!args.spec_path.empty()) {
    ct::SpecDocument doc = ct::spec_document_from_json(ct::parse_json_file(args.spec_path));
    if (args.seed != 0) doc.seed = args.seed;
    ct::GenerateOptions opt;
    opt.covariate_count = doc.covariate_count;
    const ct::GeneratedData data = ct::generate(doc.spec, doc.n, doc.seed, opt);
    dataset = ct::dataset_from_generated(data, args.expose_u);
    kinds = {doc.spec.kind};
    truth = doc.spec;
  } else if (!args.data_path.empty()) {
    if (args.roles_text.empty()) {
      throw ct::ParseError("--roles is required with --data");
    }
    const ct::ColumnRoles roles = ct::ColumnRoles::parse(args.roles_text);
    dataset = ct::ingest_csv(args.data_path, roles);
    if (args.expose_u && !dataset.has_latent()) {
      throw ct::ParseError("--expose-u requires a u role column");
    }
    kinds = args.kinds.empty()
                ? std::vector<ct::ScenarioKind>{ct::ScenarioKind::exclusion_restriction,
                                                ct::ScenarioKind::independence,
                                                ct::ScenarioKind::heterogeneity}
                : parse_kinds(args.kinds);
  } else {
    throw ct::ParseError("sensitivity needs --spec or --data");
  }

  ct::Json reports = ct::Json::array();
  std::string summary_text;
  for (const ct::ScenarioKind kind : kinds) {
    ct::SensitivityReport report =
        ct::run_sensitivity(dataset, kind, args.multipliers, args.expose_u);
    if (truth) report.true_ir = true_ir_of(*truth);
    reports.push_back(ct::to_json(report));

    summary_text += "kind " + ct::to_string(kind) + ": benchmarked " +
                    report.violation_label + " violation = " +
                    ct::svg_format(report.benchmarked_violation) + "\n";
    for (const auto& br : report.branches) {
      summary_text += "  branch " + ct::to_string(br.sign_case) + ":";
      for (std::size_t m = 0; m < report.multipliers.size(); ++m) {
        summary_text += " IR(M=" + ct::svg_format(report.multipliers[m]) + ")=" +
                        ct::svg_format(br.ir_per_multiplier[m]);
      }
      summary_text += "\n";
    }

    if (!args.out_dir.empty()) {
      // One plot per sign case unless the branches agree numerically.
      std::vector<const ct::BranchReport*> to_plot = {&report.branches[0]};
      if (report.branches.size() > 1) {
        bool same = true;
        for (std::size_t m = 0; m < report.multipliers.size(); ++m) {
          if (std::abs(report.branches[0].ir_per_multiplier[m] -
                       report.branches[1].ir_per_multiplier[m]) > 1e-6) {
            same = false;
          }
        }
        if (!same) to_plot.push_back(&report.branches[1]);
      }
      for (std::size_t p = 0; p < to_plot.size(); ++p) {
        const std::string stem = "sensitivity_" + ct::to_string(kind) +
                                 (p == 0 ? "" : "_" + ct::to_string(to_plot[p]->sign_case));
        ct::write_text_atomic((fs::path(args.out_dir) / "plots" / (stem + ".svg")).string(),
                              ct::sensitivity_svg(report, *to_plot[p]));
      }
      ct::write_json_atomic((fs::path(args.out_dir) / "plots" /
                             ("sensitivity_" + ct::to_string(kind) + ".json"))
                                .string(),
                            ct::to_json(report));
    }
  }

  if (args.out_dir.empty()) {
    std::cout << reports.dump(2) << "\n";
  } else {
    ct::write_json_atomic((fs::path(args.out_dir) / "report.json").string(), reports);
    ct::write_text_atomic((fs::path(args.out_dir) / "summary.txt").string(), summary_text);
  }
  return 0;
}

int cmd_contour(const std::string& spec_path, const std::string& strength_range,
                const std::string& violation_range, const std::string& out_dir) {
  const ct::SpecDocument doc = ct::spec_document_from_json(ct::parse_json_file(spec_path));
  auto parse_axis = [](const std::string& text, const std::string& name, double def_start) {
    ct::GridAxis axis;
    axis.name = name;
    if (text.empty()) {
      axis.start = def_start;
      axis.stop = 0.9;
      axis.step = 0.05;
      return axis;
    }
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &axis.start, &axis.stop, &axis.step) != 3) {
      throw ct::ParseError("axis '" + text + "' is not start:stop:step");
    }
    return axis;
  };
  const ct::GridAxis strength =
      parse_axis(strength_range, ct::strength_key(doc.spec.kind), 0.05);
  const ct::GridAxis violation =
      parse_axis(violation_range, ct::violation_key(doc.spec.kind), 0.0);
  const ct::ContourGrid grid = ct::contour(doc.spec, strength, violation);
  emit(ct::to_json(grid), out_dir, "contour.json");
  if (!out_dir.empty()) {
    const std::string stem = "contour_" + ct::to_string(doc.spec.kind);
    ct::write_text_atomic((fs::path(out_dir) / "plots" / (stem + ".svg")).string(),
                          ct::contour_svg(grid));
    ct::write_json_atomic((fs::path(out_dir) / "plots" / (stem + ".json")).string(),
                          ct::to_json(grid));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Compare the inconsistency of confounder adjustment (OLS) and instrumental\n"
      "variable estimation (2SLS) for the average causal effect under assumption\n"
      "violations: closed forms, Monte Carlo checks, and partial-R2 benchmarking\n"
      "sensitivity analysis."};
  app.require_subcommand(1);

  std::string spec_path, plan_path, out_dir;
  auto* cf = app.add_subcommand("closed-form", "Probability limits and inconsistencies");
  cf->add_option("--spec", spec_path, "scenario JSON")->required();
  cf->add_option("--out", out_dir, "output directory");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo verification of the closed forms");
  sim->add_option("--spec,--plan", plan_path, "experiment plan JSON")->required();
  sim->add_option("--out", out_dir, "output directory");

  SensitivityArgs sens_args;
  auto add_sensitivity_options = [&](CLI::App* cmd, bool data_required) {
    auto* data = cmd->add_option("--data", sens_args.data_path, "CSV dataset");
    if (data_required) data->required();
    cmd->add_option("--roles", sens_args.roles_text,
                    "y=COL,x=COL,z=COL,w=COL1+COL2[,u=COL]");
    if (!data_required) cmd->add_option("--spec", sens_args.spec_path, "scenario JSON");
    cmd->add_option("--config", sens_args.config_path, "JSON config (flags override)");
    cmd->add_option("--multipliers", sens_args.multipliers, "confounding multipliers")
        ->delimiter(',');
    cmd->add_option("--kinds", sens_args.kinds, "violation kinds to run")->delimiter(',');
    cmd->add_option("--seed", sens_args.seed, "seed override for --spec mode");
    cmd->add_option("--out", sens_args.out_dir, "output directory");
    cmd->add_flag("--expose-u", sens_args.expose_u,
                  "oracle mode: use the latent confounder column");
  };
  auto* sens = app.add_subcommand(
      "sensitivity", "Benchmarking sensitivity analysis (simulated or user data)");
  add_sensitivity_options(sens, false);
  auto* analyze = app.add_subcommand("analyze", "Sensitivity analysis over a user CSV");
  add_sensitivity_options(analyze, true);

  std::string strength_range, violation_range;
  auto* cont = app.add_subcommand("contour", "Winner surfaces over strength x violation");
  cont->add_option("--spec", spec_path, "scenario JSON with the fixed weights")->required();
  cont->add_option("--strength", strength_range, "start:stop:step");
  cont->add_option("--violation", violation_range, "start:stop:step");
  cont->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
    if (cf->parsed()) return cmd_closed_form(spec_path, out_dir);
    if (sim->parsed()) return cmd_simulate(plan_path, out_dir);
    if (sens->parsed() || analyze->parsed()) {
      if (analyze->parsed()) sens_args.spec_path.clear();
      return cmd_sensitivity(sens_args);
    }
    if (cont->parsed()) {
      return cmd_contour(spec_path, strength_range, violation_range, out_dir);
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  } catch (const ct::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
