#pragma once

#include <stdexcept>
#include <string>

namespace sectopo {

/// Base class of every numeric failure raised by the library. The CLI maps
/// these to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularConstraintSystem : public NumericError {
public:
    using NumericError::NumericError;
};

class CoordinateSingularity : public NumericError {
public:
    using NumericError::NumericError;
};

class StepSizeUnderflow : public NumericError {
public:
    using NumericError::NumericError;
};

class ProjectionDiverged : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateSegment : public NumericError {
public:
    using NumericError::NumericError;
};

class ReductionInvalid : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateWindow : public NumericError {
public:
    using NumericError::NumericError;
};

/// Invalid parameters or configuration (exit code 2 at the CLI).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, std::string field = {})
        : std::runtime_error(what), line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

} // namespace sectopo
