#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kinhom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied input was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Source iteration exhausted its budget.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::size_t iterations, double last_residual)
        : Error(what), iterations_(iterations), last_residual_(last_residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    std::size_t iterations_;
    double last_residual_;
};

/// A NaN or Inf appeared in a solver state.
class NonFinite : public Error {
public:
    NonFinite(const std::string& what, std::size_t cell, std::size_t ordinate)
        : Error(what), cell_(cell), ordinate_(ordinate) {}

    std::size_t cell() const noexcept { return cell_; }
    std::size_t ordinate() const noexcept { return ordinate_; }

private:
    std::size_t cell_;
    std::size_t ordinate_;
};

/// Golden-section search could not bracket a minimum.
class BracketFailure : public Error {
public:
    BracketFailure(const std::string& what, std::vector<std::pair<double, double>> trace)
        : Error(what), trace_(std::move(trace)) {}

    /// (parameter, objective) pairs sampled before giving up.
    const std::vector<std::pair<double, double>>& trace() const noexcept { return trace_; }

private:
    std::vector<std::pair<double, double>> trace_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

} // namespace kinhom
