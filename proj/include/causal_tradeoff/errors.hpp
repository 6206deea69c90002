#pragma once

#include <stdexcept>
#include <string>

namespace causal_tradeoff {

// Exit-code buckets used by the CLI: 2 = infeasible or degenerate input,
// 3 = I/O or schema problem, 4 = numerical degeneracy discovered mid-computation.
enum class ErrorCode : int {
  infeasible_input = 2,
  io_or_schema = 3,
  numerical = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct ZeroVariance : Error {
  explicit ZeroVariance(const std::string& what) : Error(ErrorCode::infeasible_input, what) {}
};

struct Collinear : Error {
  explicit Collinear(const std::string& what) : Error(ErrorCode::numerical, what) {}
};

struct WeakDenominator : Error {
  explicit WeakDenominator(const std::string& what) : Error(ErrorCode::numerical, what) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& what) : Error(ErrorCode::numerical, what) {}
};

struct Infeasible : Error {
  explicit Infeasible(const std::string& what) : Error(ErrorCode::infeasible_input, what) {}
};

struct NotDerived : Error {
  explicit NotDerived(const std::string& what) : Error(ErrorCode::infeasible_input, what) {}
};

struct DegenerateDenominator : Error {
  explicit DegenerateDenominator(const std::string& what) : Error(ErrorCode::numerical, what) {}
};

struct EmptyGrid : Error {
  explicit EmptyGrid(const std::string& what) : Error(ErrorCode::infeasible_input, what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorCode::io_or_schema, what) {}
};

struct MissingColumn : Error {
  explicit MissingColumn(const std::string& what) : Error(ErrorCode::io_or_schema, what) {}
};

struct NonNumeric : Error {
  explicit NonNumeric(const std::string& what) : Error(ErrorCode::io_or_schema, what) {}
};

}  // namespace causal_tradeoff
