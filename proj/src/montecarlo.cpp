#include "causal_tradeoff/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "causal_tradeoff/errors.hpp"
#include "causal_tradeoff/regression.hpp"
#include "causal_tradeoff/rng.hpp"

namespace causal_tradeoff {

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::ols_without_z: return "ols_without_z";
    case Estimator::ols_with_z: return "ols_with_z";
    case Estimator::tsls_with_z: return "tsls_with_z";
  }
  return "unknown";
}

Estimator estimator_from_string(const std::string& s) {
  if (s == "ols_without_z") return Estimator::ols_without_z;
  if (s == "ols_with_z") return Estimator::ols_with_z;
  if (s == "tsls_with_z") return Estimator::tsls_with_z;
  throw ParseError("unknown estimator '" + s + "'");
}

int worker_count() {
  if (const char* env = std::getenv("CAUSAL_TRADEOFF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

double estimate_on(const GeneratedData& data, const ScenarioSpec& spec, Estimator which) {
  const bool cov = spec.with_covariates;
  const bool het = spec.kind == ScenarioKind::heterogeneity;
  const NumericColumn y = center(data.column("y"));
  const NumericColumn x = center(data.column("x"));
  const NumericColumn z = center(data.column("z"));

  std::vector<NumericColumn> exog;
  if (cov) {
    exog.push_back(center(data.column("w")));
    if (het) exog.push_back(center(data.column("xw")));
  }

  switch (which) {
    case Estimator::ols_without_z: {
      std::vector<NumericColumn> regs = {x};
      regs.insert(regs.end(), exog.begin(), exog.end());
      return fit_ols(y, regs).coefficients[0];
    }
    case Estimator::ols_with_z: {
      std::vector<NumericColumn> regs = {x, z};
      regs.insert(regs.end(), exog.begin(), exog.end());
      return fit_ols(y, regs).coefficients[0];
    }
    case Estimator::tsls_with_z: {
      if (het && cov) {
        // XW is endogenous too and gets ZW as its instrument.
        const NumericColumn xw = center(data.column("xw"));
        const NumericColumn zw = center(data.column("zw"));
        const NumericColumn w = center(data.column("w"));
        return fit_2sls(y, {x, xw}, {z, zw}, {w}).coefficients[0];
      }
      std::vector<NumericColumn> ex;
      if (cov) ex.push_back(center(data.column("w")));
      return fit_2sls(y, {x}, {z}, ex).coefficients[0];
    }
  }
  throw Error(ErrorCode::io_or_schema, "unknown estimator");
}

namespace {

std::optional<double> target_for(const ClosedFormResult& cf, Estimator e) {
  switch (e) {
    case Estimator::ols_without_z: return cf.lambda2;
    case Estimator::ols_with_z: return cf.lambda3;
    case Estimator::tsls_with_z: return cf.lambda4;
  }
  return std::nullopt;
}

}  // namespace

SimulationSummary run(const ExperimentPlan& plan) {
  if (plan.replications < 2) {
    throw Error(ErrorCode::infeasible_input, "at least 2 replications required");
  }
  if (plan.n_per_rep < 50) {
    throw Error(ErrorCode::infeasible_input, "at least 50 observations per replication");
  }
  const ClosedFormResult cf = closed_form(plan.spec);
  const auto t0 = std::chrono::steady_clock::now();

  const int R = plan.replications;
  const int E = static_cast<int>(plan.estimators.size());
  std::vector<double> estimates(static_cast<std::size_t>(R) * E, 0.0);
  std::vector<int> resamples(R, 0);

  const int max_attempts = 8;
  auto run_replication = [&](int r) {
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t seed =
          attempt == 0 ? NormalSampler::replication_seed(plan.seed, r)
                       : NormalSampler::retry_seed(plan.seed, r, attempt);
      try {
        const GeneratedData data = generate(plan.spec, plan.n_per_rep, seed);
        for (int e = 0; e < E; ++e) {
          estimates[static_cast<std::size_t>(r) * E + e] =
              estimate_on(data, plan.spec, plan.estimators[e]);
        }
        resamples[r] = attempt;
        return;
      } catch (const Collinear&) {
      } catch (const WeakDenominator&) {
      }
      if (attempt + 1 >= max_attempts) {
        throw Error(ErrorCode::numerical,
                    "replication " + std::to_string(r) + " failed repeatedly");
      }
    }
  };

  const int workers = std::min(worker_count(), R);
  if (workers <= 1) {
    for (int r = 0; r < R; ++r) run_replication(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) {
          try {
            run_replication(r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  SimulationSummary out;
  out.n_per_rep = plan.n_per_rep;
  out.replications = R;
  out.seed = plan.seed;
  for (int r = 0; r < R; ++r) out.resampled += resamples[r];
  if (out.resampled > std::max(1, R / 100)) {
    throw Error(ErrorCode::numerical,
                "more than 1% of replications needed resampling; spec is numerically fragile");
  }

  const double ace = plan.spec.ace();
  for (int e = 0; e < E; ++e) {
    EstimatorSummary s;
    s.estimator = plan.estimators[e];
    double mean = 0.0;
    for (int r = 0; r < R; ++r) mean += estimates[static_cast<std::size_t>(r) * E + e];
    mean /= R;
    double ss = 0.0;
    for (int r = 0; r < R; ++r) {
      const double d = estimates[static_cast<std::size_t>(r) * E + e] - mean;
      ss += d * d;
    }
    s.mean_estimate = mean;
    s.mean_inconsistency = std::abs(mean - ace);
    s.mc_std_err = std::sqrt(ss / (R - 1)) / std::sqrt(double(R));
    if (!(s.estimator == Estimator::ols_with_z && !cf.lambda3)) {
      s.closed_form_target = *target_for(cf, s.estimator);
      s.z_score = (s.mean_inconsistency - *s.closed_form_target) / s.mc_std_err;
    }
    out.estimators.push_back(s);
  }
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<SimulationSummary> convergence_scan(const ScenarioSpec& spec,
                                                const std::vector<Eigen::Index>& n_grid,
                                                int replications, std::uint64_t seed) {
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) {
      throw Error(ErrorCode::infeasible_input, "n_grid must be strictly increasing");
    }
  }
  std::vector<SimulationSummary> out;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    ExperimentPlan plan;
    plan.spec = spec;
    plan.n_per_rep = n_grid[i];
    plan.replications = replications;
    plan.seed = seed ^ (0xd1b54a32d192ed03ULL * (i + 1));
    out.push_back(run(plan));
  }
  return out;
}

std::string to_text_table(const SimulationSummary& summary) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %14s %14s %12s %8s\n", "estimator",
                "closed form", "simulated", "mc std err", "z");
  os << line;
  for (const auto& s : summary.estimators) {
    const std::string target =
        s.closed_form_target ? [&] {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.3f", *s.closed_form_target);
          return std::string(buf);
        }() : std::string("n/a");
    const std::string z = s.z_score ? [&] {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", *s.z_score);
      return std::string(buf);
    }() : std::string("n/a");
    std::snprintf(line, sizeof(line), "%-16s %14s %14.3f %12.4f %8s\n",
                  to_string(s.estimator).c_str(), target.c_str(), s.mean_inconsistency,
                  s.mc_std_err, z.c_str());
    os << line;
  }
  char tail[120];
  std::snprintf(tail, sizeof(tail), "n=%lld replications=%d seed=%llu resampled=%d\n",
                static_cast<long long>(summary.n_per_rep), summary.replications,
                static_cast<unsigned long long>(summary.seed), summary.resampled);
  os << tail;
  return os.str();
}

}  // namespace causal_tradeoff
