#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace occutime {

enum class ErrorCode {
  InvalidInput,
  NegativeOffDiagonal,
  PositiveRowSum,
  ZeroDiagonal,
  NonConservativeRow,
  NotSkipFree,
  NotTridiagonal,
  ZeroBackRate,
  NoKillingReachable,
  SingularMatrix,
  NotPositiveDefinite,
  NonPositiveDeterminant,
  IndexOutOfRange,
  PathLengthExceeded,
  NotApplicable,
  EliminationBreakdown,
  InternalConsistency,
  MalformedInput,
};

std::string_view to_string(ErrorCode code) noexcept;

inline constexpr std::size_t no_index = std::numeric_limits<std::size_t>::max();

// Every library failure is reported through this type. `row`/`col` name the
// offending matrix location when there is one, otherwise `no_index`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t row = no_index,
        std::size_t col = no_index);

  ErrorCode code() const noexcept { return code_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  ErrorCode code_;
  std::size_t row_;
  std::size_t col_;
};

// Raised by the simulator when a trajectory exceeds the jump budget.
// `completed_paths` counts paths finished before the failing one, in
// deterministic path order.
class PathLengthExceeded : public Error {
 public:
  PathLengthExceeded(std::size_t completed_paths, std::size_t max_jumps);
  std::size_t completed_paths() const noexcept { return completed_; }

 private:
  std::size_t completed_;
};

}  // namespace occutime
