#include "sme/error.hpp"

namespace sme {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::SingularSystem: return "singular-system";
        case ErrorKind::SingularB: return "singular-B";
        case ErrorKind::EigensolverFailure: return "eigensolver-failure";
        case ErrorKind::UnphysicalState: return "unphysical-state";
        case ErrorKind::NanDetected: return "nan-detected";
        case ErrorKind::NoCrossing: return "no-crossing";
        case ErrorKind::NoSteadyState: return "no-steady-state";
        case ErrorKind::StiffSource: return "stiff-source";
        case ErrorKind::CacheFormat: return "cache-format";
    }
    return "unknown";
}

}  // namespace sme
