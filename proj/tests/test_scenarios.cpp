#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "causal_tradeoff/json_io.hpp"
#include "causal_tradeoff/scenario.hpp"
#include "support/population.hpp"
#include "support/specs.hpp"

using namespace causal_tradeoff;
using namespace causal_tradeoff::testing;

TEST_CASE("closed forms for the exclusion restriction reference regimes") {
  const ClosedFormResult nocov = closed_form(er_reference_nocov());
  CHECK(nocov.lambda2 == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(*nocov.lambda3 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(nocov.lambda4 == doctest::Approx(0.5).epsilon(1e-12));

  const ClosedFormResult cov = closed_form(er_reference_cov());
  CHECK(cov.lambda2 == doctest::Approx(0.335 / 0.84).epsilon(1e-12));
  CHECK(*cov.lambda3 == doctest::Approx(0.16 / 0.35).epsilon(1e-12));
  CHECK(cov.lambda4 == doctest::Approx(0.25 / 0.7).epsilon(1e-12));
}

TEST_CASE("closed forms for the independence reference regimes") {
  const ClosedFormResult nocov = closed_form(ind_reference_nocov());
  CHECK(nocov.lambda2 == doctest::Approx(0.3125).epsilon(1e-12));
  CHECK(*nocov.lambda3 == doctest::Approx(0.234375 / 0.609375).epsilon(1e-12));
  CHECK(nocov.lambda4 == doctest::Approx(0.2).epsilon(1e-12));

  const ClosedFormResult cov = closed_form(ind_reference_cov());
  CHECK(cov.lambda2 == doctest::Approx(0.289905).epsilon(1e-6));
  CHECK(*cov.lambda3 == doctest::Approx(0.393673).epsilon(1e-6));
  CHECK(cov.lambda4 == doctest::Approx(0.175824).epsilon(1e-6));
}

TEST_CASE("independence closed forms agree with exact population regressions") {
  // Two independent routes: the factored formulas vs a population least
  // squares solve on the exact covariance structure.
  for (const ScenarioSpec& spec : {ind_reference_nocov(), ind_reference_cov()}) {
    const ClosedFormResult cf = closed_form(spec);
    const PopulationModel pop = population_model(spec);
    std::vector<std::string> a2 = {"x"};
    std::vector<std::string> a3 = {"x", "z"};
    if (spec.with_covariates) {
      a2.push_back("w");
      a3.push_back("w");
    }
    CHECK(pop.coefficients("y", a2)[0] == doctest::Approx(cf.a2).epsilon(1e-10));
    CHECK(pop.coefficients("y", a3)[0] == doctest::Approx(*cf.a3).epsilon(1e-10));
  }
}

TEST_CASE("closed forms for the heterogeneity reference regimes") {
  const ClosedFormResult nocov = closed_form(het_reference_nocov());
  CHECK(nocov.lambda2 == doctest::Approx(0.039).epsilon(1e-12));
  CHECK(*nocov.lambda3 == doctest::Approx(0.0345 / 0.7975).epsilon(1e-12));
  CHECK(nocov.lambda4 == doctest::Approx(0.01 / 0.45).epsilon(1e-12));

  const ClosedFormResult cov = closed_form(het_reference_cov());
  CHECK(cov.lambda2 == doctest::Approx(0.040218).epsilon(1e-4));
  CHECK(cov.lambda4 == doctest::Approx(0.023377).epsilon(1e-4));
  CHECK(!cov.a3.has_value());
  CHECK_THROWS_AS(cov.a3_value(), NotDerived);
  CHECK_THROWS_AS(cov.lambda3_value(), NotDerived);
}

TEST_CASE("a zero violation weight makes the IV estimator consistent") {
  ScenarioSpec er = er_reference_nocov();
  er.weights["c_er"] = 0.0;
  CHECK(closed_form(er).lambda4 == doctest::Approx(0.0));

  ScenarioSpec ind = ind_reference_cov();
  ind.weights["c_i"] = 0.0;
  ind.weights["c7"] = 0.0;
  CHECK(closed_form(ind).lambda4 == doctest::Approx(0.0));

  ScenarioSpec het = het_reference_nocov();
  het.weights["alpha3"] = 0.0;
  CHECK(closed_form(het).lambda4 == doctest::Approx(0.0));
}

TEST_CASE("perfect IV: adjusting for the instrument amplifies the bias") {
  for (double c1 : {0.2, 0.4, 0.6}) {
    for (double c3 : {0.2, 0.4, 0.6}) {
      const ScenarioSpec spec = make_spec(
          ScenarioKind::perfect_iv, false,
          {{"c0", 0.2}, {"c1", c1}, {"c2", c1}, {"c3", c3}});
      if (!is_feasible(spec)) continue;
      const ClosedFormResult cf = closed_form(spec);
      CHECK(*cf.lambda3 > cf.lambda2);
      CHECK(cf.lambda2 > cf.lambda4);
      CHECK(cf.lambda4 == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("error variances: reference values and infeasibility") {
  ScenarioSpec perfect = make_spec(ScenarioKind::perfect_iv, false,
                                   {{"c0", 0.3}, {"c1", 0.5}, {"c2", 0.5}, {"c3", 0.5}});
  CHECK(feasible_error_variances(perfect).at("eps_x") == doctest::Approx(0.5).epsilon(1e-12));

  perfect.weights["c1"] = 0.8;
  perfect.weights["c3"] = 0.8;
  CHECK_THROWS_AS(feasible_error_variances(perfect), Infeasible);

  const auto vars = feasible_error_variances(ind_reference_nocov());
  CHECK(vars.at("eps_x") == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(vars.at("eps_z") == doctest::Approx(1.0 - 0.0625).epsilon(1e-12));
}

TEST_CASE("weights outside (-1,1) are rejected") {
  ScenarioSpec spec = er_reference_nocov();
  spec.weights["c1"] = 1.0;
  CHECK_THROWS_AS(closed_form(spec), Infeasible);
}

TEST_CASE("generated covariance matches the direct-path weight for a perfect IV") {
  ScenarioSpec spec = make_spec(ScenarioKind::perfect_iv, false,
                                {{"c0", 0.3}, {"c1", 0.5}, {"c2", 0.5}, {"c3", 0.5}});
  const GeneratedData data = generate(spec, 1000000, 17);
  const double cov = sample_covariance(data.column("x").values, data.column("z").values);
  CHECK(cov == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("generated structural columns have unit variance") {
  for (const ScenarioSpec& spec :
       {er_reference_cov(), ind_reference_cov(), het_reference_cov()}) {
    const Eigen::Index n = 100000;
    const GeneratedData data = generate(spec, n, 23);
    const double tol = 5.0 / std::sqrt(double(n));
    for (const char* name : {"y", "x", "z", "u", "w"}) {
      CHECK(std::abs(sample_variance(data.column(name).values) - 1.0) < tol);
    }
  }
}

TEST_CASE("generated latent moments match the standard normal") {
  const Eigen::Index n = 200000;
  const GeneratedData data = generate(het_reference_cov(), n, 26);
  const auto& u = data.column("u").values;
  const double m3 = u.array().cube().mean();
  const double m4 = u.array().pow(4).mean();
  CHECK(std::abs(m3) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(m4 - 3.0) < 20.0 / std::sqrt(double(n)));
}

TEST_CASE("generation is a pure function of spec, n and seed") {
  const GeneratedData a = generate(ind_reference_cov(), 5000, 31);
  const GeneratedData b = generate(ind_reference_cov(), 5000, 31);
  const GeneratedData c = generate(ind_reference_cov(), 5000, 32);
  REQUIRE(a.columns.size() == b.columns.size());
  for (std::size_t i = 0; i < a.columns.size(); ++i) {
    CHECK(a.columns[i].values == b.columns[i].values);
  }
  CHECK(a.column("x").values != c.column("x").values);
}

TEST_CASE("split covariates carry the composite through the structural equations") {
  GenerateOptions opt;
  opt.covariate_count = 3;
  const GeneratedData data = generate(er_demo(0.05), 20000, 37, opt);
  CHECK(data.has_column("w1"));
  CHECK(data.has_column("w3"));
  // The composite is standard-normal-scaled by construction.
  CHECK(std::abs(sample_variance(data.column("w").values) - 1.0) < 0.01);
}

TEST_CASE("trade-off boundary: IV beats adjustment exactly past the printed threshold") {
  // Scan the feasible grid at step 0.05; the boundary must be exact.
  int checked = 0;
  for (double c1 = 0.05; c1 < 1.0; c1 += 0.05) {
    for (double c2 = 0.05; c2 < 1.0; c2 += 0.05) {
      for (double c3 = 0.05; c3 < 1.0; c3 += 0.05) {
        for (double cer = 0.05; cer < 1.0; cer += 0.05) {
          const ScenarioSpec spec =
              make_spec(ScenarioKind::exclusion_restriction, false,
                        {{"c0", 0.2}, {"c1", c1}, {"c2", c2}, {"c3", c3}, {"c_er", cer}});
          if (!is_feasible(spec)) continue;
          const ClosedFormResult cf = closed_form(spec);
          const double lhs = cer / c3;
          const double rhs = c1 * c2 / (1.0 - c3 * c3);
          if (std::abs(lhs - rhs) < 1e-9) continue;  // boundary itself
          CHECK((cf.lambda4 >= *cf.lambda3) == (lhs >= rhs));
          // The same threshold separates adjusting from not adjusting.
          CHECK((*cf.lambda3 <= cf.lambda2) == (lhs >= rhs));
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("heterogeneity amplification boundary matches the lambda comparison") {
  // Adjusting for the instrument hurts exactly when
  // 2 a1^2 + a1 (a2 b2) / (a3 b3) > 1 (all products positive).
  int checked = 0;
  for (double a1 = 0.05; a1 < 0.75; a1 += 0.05) {
    for (double a2 = 0.05; a2 < 0.6; a2 += 0.1) {
      for (double a3 = 0.05; a3 < 0.6; a3 += 0.1) {
        for (double b2 = 0.05; b2 < 0.6; b2 += 0.1) {
          for (double b3 = 0.05; b3 < 0.6; b3 += 0.1) {
            const ScenarioSpec spec = make_spec(
                ScenarioKind::heterogeneity, false,
                {{"alpha1", a1}, {"alpha2", a2}, {"alpha3", a3},
                 {"beta1", 0.1}, {"beta2", b2}, {"beta3", b3}});
            if (!is_feasible(spec)) continue;
            const ClosedFormResult cf = closed_form(spec);
            const double condition = 2.0 * a1 * a1 + a1 * a2 * b2 / (a3 * b3);
            if (std::abs(condition - 1.0) < 1e-9) continue;
            CHECK((*cf.lambda3 > cf.lambda2) == (condition > 1.0));
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 5000);
}

TEST_CASE("scenario JSON round trip") {
  const ScenarioSpec spec = het_reference_cov();
  Json j = to_json(spec);
  j["n"] = 750;
  j["seed"] = 99;
  const SpecDocument doc = spec_document_from_json(j);
  CHECK(doc.spec.kind == spec.kind);
  CHECK(doc.spec.with_covariates == spec.with_covariates);
  CHECK(doc.spec.weights == spec.weights);
  CHECK(doc.n == 750);
  CHECK(doc.seed == 99);
}
