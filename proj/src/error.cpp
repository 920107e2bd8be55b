#include "sdc/error.hpp"

namespace sdc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::DuplicateTask: return "DuplicateTask";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::NotLeveled: return "NotLeveled";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::InconsistentInputs: return "InconsistentInputs";
    case ErrorCode::AssignmentMismatch: return "AssignmentMismatch";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::ComputationSucceeded: return "ComputationSucceeded";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::NotAPath: return "NotAPath";
    case ErrorCode::DegenerateWalk: return "DegenerateWalk";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::GraphLoadFailed: return "GraphLoadFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace sdc
