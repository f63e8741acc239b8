#include "skillforge/error.hpp"

#include <sstream>

namespace skillforge {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::InvalidTrajectory: return "invalid-trajectory";
        case ErrorKind::NotPositiveDefinite: return "not-positive-definite";
        case ErrorKind::DegenerateConstraints: return "degenerate-constraints";
        case ErrorKind::IllPosedEnergy: return "ill-posed-energy";
        case ErrorKind::IllPosedFit: return "ill-posed-fit";
        case ErrorKind::InvalidConstraints: return "invalid-constraints";
        case ErrorKind::TrustRegionTooWeak: return "trust-region-too-weak";
        case ErrorKind::FormatError: return "format-error";
        case ErrorKind::OutOfRegion: return "out-of-region";
        case ErrorKind::VersionMismatch: return "version-mismatch";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

std::string Error::name() const { return module_ + ":" + to_string(kind_); }

namespace {

std::string pivot_message(std::size_t pivot, double value) {
    std::ostringstream os;
    os << "matrix is not positive definite: pivot " << pivot << " = " << value;
    return os.str();
}

std::string rows_message(const std::vector<std::size_t>& rows) {
    std::ostringstream os;
    os << "constraint rows are linearly dependent:";
    for (auto r : rows) os << ' ' << r;
    return os.str();
}

std::string rho_message(double rho, double min_rho) {
    std::ostringstream os;
    os << "trust-region weight rho=" << rho << " does not dominate the repulsion; need rho > "
       << min_rho;
    return os.str();
}

}  // namespace

NotPositiveDefiniteError::NotPositiveDefiniteError(std::size_t pivot, double value)
    : Error(ErrorKind::NotPositiveDefinite, "numsolve", pivot_message(pivot, value)),
      pivot_(pivot),
      value_(value) {}

DegenerateConstraintsError::DegenerateConstraintsError(std::vector<std::size_t> dependent_rows)
    : Error(ErrorKind::DegenerateConstraints, "numsolve", rows_message(dependent_rows)),
      rows_(std::move(dependent_rows)) {}

TrustRegionTooWeakError::TrustRegionTooWeakError(double rho, double min_feasible_rho)
    : Error(ErrorKind::TrustRegionTooWeak, "failure_aware", rho_message(rho, min_feasible_rho)),
      min_rho_(min_feasible_rho) {}

OutOfRegionError::OutOfRegionError(const std::string& message, std::vector<double> nearest_boundary)
    : Error(ErrorKind::OutOfRegion, "framework", message), nearest_(std::move(nearest_boundary)) {}

}  // namespace skillforge
