#pragma once

#include <stdexcept>
#include <string>

namespace igchaos {

/// Invalid input: non-positive sigma, mismatched shapes, bad configuration.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical procedure failed to meet its contract (non-convergence, overflow).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace igchaos
