#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace namesim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside the domain of a closed form (e.g. 1 - mu*omega0*t <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

// |mu| >= 2: damped/over-damped transition of the free dynamics.
class ExceptionalPointError : public DomainError {
public:
    using DomainError::DomainError;
};

// Gaussian state left the physical region (discriminant <= 0, n <= |s|).
class PhysicalityError : public Error {
public:
    using Error::Error;
};

class StepFailure : public Error {
public:
    using Error::Error;
};

class DefectiveMatrixError : public Error {
public:
    using Error::Error;
};

class InstabilityError : public Error {
public:
    using Error::Error;
};

class GridMismatchError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    ConfigError(const std::string& message);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

} // namespace namesim
