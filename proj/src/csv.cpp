#include "causal_tradeoff/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "causal_tradeoff/errors.hpp"
#include "causal_tradeoff/json_io.hpp"

namespace causal_tradeoff {

ColumnRoles ColumnRoles::parse(const std::string& text) {
  ColumnRoles roles;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ParseError("role '" + item + "' is not of the form key=column");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (value.empty()) throw ParseError("empty column name for role '" + key + "'");
    if (key == "y") {
      roles.outcome = value;
    } else if (key == "x") {
      roles.exposure = value;
    } else if (key == "z") {
      roles.instrument = value;
    } else if (key == "u") {
      roles.latent = value;
    } else if (key == "w") {
      std::stringstream ws(value);
      std::string w;
      while (std::getline(ws, w, '+')) {
        if (!w.empty()) roles.covariates.push_back(w);
      }
    } else {
      throw ParseError("unknown role '" + key + "'");
    }
  }
  if (roles.outcome.empty() || roles.exposure.empty() || roles.instrument.empty()) {
    throw ParseError("roles must assign y, x and z columns");
  }
  return roles;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
  CsvTable table;
  for (const auto& cell : split_row(line)) {
    const std::string name = trimmed(cell);
    if (name.empty()) throw ParseError("empty header cell in '" + path + "'");
    table.header.push_back(name);
  }

  std::vector<std::vector<double>> data(table.header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != table.header.size()) {
      throw ParseError(path + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trimmed(cells[c]);
      if (cell.empty()) {
        throw ParseError(path + ": blank cell at row " + std::to_string(row) + ", column " +
                         std::to_string(c + 1));
      }
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || errno == ERANGE) {
        throw NonNumeric(path + ": non-numeric cell '" + cell + "' at row " +
                         std::to_string(row) + ", column " + std::to_string(c + 1));
      }
      data[c].push_back(v);
    }
  }
  for (auto& col : data) {
    table.columns.emplace_back(Eigen::Map<Eigen::VectorXd>(col.data(),
                                                           static_cast<Eigen::Index>(col.size())));
  }
  return table;
}

namespace {

NumericColumn find_column(const CsvTable& table, const std::string& name) {
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == name) return NumericColumn(table.columns[c], name);
  }
  throw MissingColumn("column '" + name + "' not found in input");
}

}  // namespace

Dataset ingest_csv(const std::string& path, const ColumnRoles& roles) {
  const CsvTable table = read_csv(path);
  Dataset ds;
  ds.outcome = standardize(find_column(table, roles.outcome));
  ds.exposure = standardize(find_column(table, roles.exposure));
  ds.instrument = standardize(find_column(table, roles.instrument));
  for (const auto& w : roles.covariates) {
    ds.covariates.push_back(standardize(find_column(table, w)));
  }
  if (!roles.latent.empty()) ds.latent = standardize(find_column(table, roles.latent));
  return ds;
}

void write_csv(const std::string& path, const std::vector<NumericColumn>& columns) {
  if (columns.empty()) throw Error(ErrorCode::io_or_schema, "no columns to write");
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    os << (c ? "," : "") << columns[c].name;
  }
  os << "\n";
  const Eigen::Index n = columns[0].size();
  char buf[64];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", columns[c].values[i]);
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
  write_text_atomic(path, os.str());
}

}  // namespace causal_tradeoff
