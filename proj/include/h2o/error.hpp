#pragma once

#include <stdexcept>
#include <string>

namespace h2o {

// Invalid SimConfig or config file contents.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Caller violated an operation's precondition (shapes, lengths, ranges).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// A UE sits exactly on a ground node, so the R^-2 path loss is unbounded.
class GeometryError : public std::domain_error {
public:
    explicit GeometryError(const std::string& what) : std::domain_error(what) {}
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// The brute-force oracle refuses instances beyond its size guard.
class RefusalError : public std::runtime_error {
public:
    explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace h2o
