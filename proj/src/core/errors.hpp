#pragma once

#include <stdexcept>
#include <string>

namespace stepsvm {

// Bad arguments, shape mismatches, degenerate inputs.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failures and unreadable input files.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents; reported with line/field context.
class parse_error : public io_error {
public:
    explicit parse_error(const std::string& msg) : io_error(msg) {}
};

// Optimizer failed to reach the requested tolerance.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Pearson correlation of a constant vector; callers usually treat the
// pair as uncorrelated.
class undefined_correlation : public validation_error {
public:
    explicit undefined_correlation(const std::string& msg) : validation_error(msg) {}
};

} // namespace stepsvm
