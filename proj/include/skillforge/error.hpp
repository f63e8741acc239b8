#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skillforge {

/// Error kinds shared across modules. The CLI prints `module:kind` on stderr.
enum class ErrorKind {
    InvalidArgument,
    InvalidTrajectory,
    NotPositiveDefinite,
    DegenerateConstraints,
    IllPosedEnergy,
    IllPosedFit,
    InvalidConstraints,
    TrustRegionTooWeak,
    FormatError,
    OutOfRegion,
    VersionMismatch,
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& module() const noexcept { return module_; }
    /// "module:kind", e.g. "numsolve:not-positive-definite".
    [[nodiscard]] std::string name() const;

private:
    ErrorKind kind_;
    std::string module_;
};

class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(std::size_t pivot, double value);
    [[nodiscard]] std::size_t pivot() const noexcept { return pivot_; }
    [[nodiscard]] double pivot_value() const noexcept { return value_; }

private:
    std::size_t pivot_;
    double value_;
};

class DegenerateConstraintsError : public Error {
public:
    explicit DegenerateConstraintsError(std::vector<std::size_t> dependent_rows);
    [[nodiscard]] const std::vector<std::size_t>& dependent_rows() const noexcept { return rows_; }

private:
    std::vector<std::size_t> rows_;
};

class TrustRegionTooWeakError : public Error {
public:
    TrustRegionTooWeakError(double rho, double min_feasible_rho);
    [[nodiscard]] double min_feasible_rho() const noexcept { return min_rho_; }

private:
    double min_rho_;
};

class OutOfRegionError : public Error {
public:
    OutOfRegionError(const std::string& message, std::vector<double> nearest_boundary);
    [[nodiscard]] const std::vector<double>& nearest_boundary() const noexcept { return nearest_; }

private:
    std::vector<double> nearest_;
};

}  // namespace skillforge
