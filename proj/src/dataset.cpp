#include "causal_tradeoff/dataset.hpp"

#include "causal_tradeoff/errors.hpp"

namespace causal_tradeoff {

Dataset dataset_from_generated(const GeneratedData& data, bool expose_latent) {
  Dataset ds;
  ds.outcome = standardize(data.column("y"));
  ds.exposure = standardize(data.column("x"));
  ds.instrument = standardize(data.column("z"));
  if (data.has_column("w1")) {
    for (int j = 1; data.has_column("w" + std::to_string(j)); ++j) {
      ds.covariates.push_back(standardize(data.column("w" + std::to_string(j))));
    }
  } else if (data.has_column("w")) {
    ds.covariates.push_back(standardize(data.column("w")));
  }
  if (expose_latent) ds.latent = standardize(data.column("u"));
  return ds;
}

}  // namespace causal_tradeoff
