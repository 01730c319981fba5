#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace subchan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// An argument outside the region where an integral or MGF converges.
class DomainError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class UnsupportedModeError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what + " (last residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class TrialFailure : public Error {
public:
    TrialFailure(std::uint64_t index, std::uint64_t seed, const std::string& cause)
        : Error("trial " + std::to_string(index) + " (seed " + std::to_string(seed) + ") failed: " + cause),
          index_(index), seed_(seed) {}
    std::uint64_t index() const noexcept { return index_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t index_;
    std::uint64_t seed_;
};

}  // namespace subchan
