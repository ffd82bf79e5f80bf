#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

/// Malformed or out-of-domain input: parameters outside their documented
/// range, matrices that fail the state invariants, unreadable data files.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative scheme exhausted its budget before reaching tolerance.
/// The message carries the last residual so callers can report diagnostics.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation was refused because it would exceed a configured resource
/// limit (memory, matrix dimension). Nothing was allocated when this throws.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qcorr
