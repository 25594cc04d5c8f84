#pragma once

// Shared error types and small utilities used across the library.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mipt {

// A requested object exceeds a hard capacity limit (qubit count, RDM size, ...).
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid run/observable/partition configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerically impossible branch was drawn (projection weight below trust threshold).
struct NumericalDegeneracyError : std::runtime_error {
    explicit NumericalDegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

// A density matrix failed its positivity contract.
struct InvalidDensityError : std::runtime_error {
    explicit InvalidDensityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Not enough usable points for a fit.
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Curve crossing absent or ambiguous in the overlap window.
struct CrossingError : std::runtime_error {
    explicit CrossingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// CLI exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitIo = 3,
    kExitNumericalBudget = 4,
};

#ifndef NDEBUG
#define MIPT_DEBUG_CHECKS 1
#else
#define MIPT_DEBUG_CHECKS 0
#endif

}  // namespace mipt
