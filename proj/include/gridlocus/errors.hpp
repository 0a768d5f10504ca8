#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridlocus {

enum class ErrorCode {
  MalformedDocument,
  DuplicateBusId,
  NoSwingBus,
  MultipleSwingBuses,
  DisconnectedGraph,
  InvalidImpedance,
  UnsupportedFeature,
  DimensionMismatch,
  InvalidArgument,
  SingularJacobian,
  NoConvergence,
  NotConverged,
  NonDescentDirection,
  HessianUnavailable,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. The code is stable and is what
/// the command-line front end maps onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// LU factorization of the load-flow Jacobian hit a (numerically) zero pivot.
/// `bus_id` is the external id of the bus owning the degenerate column.
class SingularJacobianError : public Error {
 public:
  SingularJacobianError(int bus_id, char component, const std::string& context);

  int bus_id() const noexcept { return bus_id_; }
  /// 'u' or 'v': which rectangular coordinate of the bus.
  char component() const noexcept { return component_; }

 private:
  int bus_id_;
  char component_;
};

}  // namespace gridlocus
