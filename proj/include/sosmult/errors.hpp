#pragma once

#include <stdexcept>
#include <string>

namespace sosmult {

/// Malformed or inconsistent input data (JSON, CLI values, bad degrees).
/// The CLI maps this to exit code 64.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation that cannot be completed (non-convergence, degenerate
/// input detected mid-run, violated internal invariant). CLI exit code 70.
class ComputeError : public std::runtime_error {
public:
    explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sosmult
