#pragma once

#include <map>
#include <string>
#include <vector>

#include "causal_tradeoff/dataset.hpp"

namespace causal_tradeoff {

struct ColumnRoles {
  std::string outcome;
  std::string exposure;
  std::string instrument;
  std::vector<std::string> covariates;
  std::string latent;  // optional oracle column name

  // Parses "y=COL,x=COL,z=COL,w=COL1+COL2[,u=COL]".
  static ColumnRoles parse(const std::string& text);
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<Eigen::VectorXd> columns;
};

// Strict rectangular numeric CSV with a header row; errors carry the 1-based
// row and column of the offending cell.
CsvTable read_csv(const std::string& path);

// Binds roles and standardizes every role column.
Dataset ingest_csv(const std::string& path, const ColumnRoles& roles);

// Floats at 17 significant digits so a round trip is exact to 1e-9 and back.
void write_csv(const std::string& path, const std::vector<NumericColumn>& columns);

}  // namespace causal_tradeoff
