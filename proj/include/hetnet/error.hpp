#pragma once

#include <stdexcept>
#include <string>

namespace hetnet {

enum class ErrorKind {
    dimension,   // shape or length mismatch
    domain,      // argument outside its admissible range
    infeasible,  // no power vector satisfies the constraints
    numerical,   // iteration failed to converge or produced garbage
    config,      // bad configuration or CLI input
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Non-convergence of an iterative routine; carries the best residual reached.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(ErrorKind::numerical, what + " (best residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace hetnet
