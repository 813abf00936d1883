#include "hmftrace/error.hpp"

namespace hmf {

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidField: return "invalid-field";
        case ErrorKind::UnsupportedDegree: return "unsupported-degree";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Pole: return "pole";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::Accuracy: return "accuracy";
        case ErrorKind::Inconsistency: return "inconsistency";
        case ErrorKind::Resource: return "resource";
        case ErrorKind::AmbiguousClassification: return "ambiguous-classification";
        case ErrorKind::DegenerateAngle: return "degenerate-angle";
        case ErrorKind::NonIntegrable: return "non-integrable";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::Config: return "config";
        case ErrorKind::Usage: return "usage";
    }
    return "unknown";
}

}  // namespace hmf
