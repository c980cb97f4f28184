#include "macfb/error.hpp"

namespace macfb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SizeGuardExceeded: return "SizeGuardExceeded";
    case ErrorKind::UnknownParent: return "UnknownParent";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::OverlappingSets: return "OverlappingSets";
    case ErrorKind::InfiniteMutualInformation: return "InfiniteMutualInformation";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NoRealSolution: return "NoRealSolution";
    case ErrorKind::InconsistentKernels: return "InconsistentKernels";
    case ErrorKind::Schema: return "Schema";
  }
  return "Unknown";
}

}  // namespace macfb
