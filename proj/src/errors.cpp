#include "gridlocus/errors.hpp"

namespace gridlocus {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::DuplicateBusId: return "DuplicateBusId";
    case ErrorCode::NoSwingBus: return "NoSwingBus";
    case ErrorCode::MultipleSwingBuses: return "MultipleSwingBuses";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::InvalidImpedance: return "InvalidImpedance";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NonDescentDirection: return "NonDescentDirection";
    case ErrorCode::HessianUnavailable: return "HessianUnavailable";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

SingularJacobianError::SingularJacobianError(int bus_id, char component,
                                             const std::string& context)
    : Error(ErrorCode::SingularJacobian,
            context + " (degenerate pivot at bus " + std::to_string(bus_id) + ", component " +
                component + ")"),
      bus_id_(bus_id),
      component_(component) {}

}  // namespace gridlocus
