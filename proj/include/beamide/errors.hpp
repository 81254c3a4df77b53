#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace beamide {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// -- usage / configuration ---------------------------------------------------

/// Invalid construction parameters (odd panel count, bad config values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operands that cannot be combined, e.g. functions sampled on different grids.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Malformed expression text. `offset` is the byte offset of the fault.
class ParseError : public Error {
public:
    enum class Kind { syntax, unknown_identifier, arity };

    ParseError(Kind kind, std::size_t offset, const std::string& what)
        : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

// -- mathematical failures ---------------------------------------------------

/// A hypothesis of the theory does not hold for the supplied data.
class MathError : public Error {
public:
    using Error::Error;
};

/// Parameter outside the range where the construction is defined (e.g. M > c0).
class DomainError : public MathError {
public:
    using MathError::MathError;
};

/// Singular parameter (m a multiple of pi) or numerically singular system.
class SingularError : public MathError {
public:
    using MathError::MathError;
};

/// The contraction constant d = |N| ||k|| max int G is not below one.
class ContractionError : public MathError {
public:
    ContractionError(double d, const std::string& what) : MathError(what), d_(d) {}
    double d() const noexcept { return d_; }

private:
    double d_;
};

/// An iteration exhausted its budget. `last_gap` is the final successive distance.
class ConvergenceError : public MathError {
public:
    ConvergenceError(double last_gap, const std::string& what) : MathError(what), last_gap_(last_gap) {}
    double last_gap() const noexcept { return last_gap_; }

private:
    double last_gap_;
};

/// An expression hit a domain fault (division by zero, sqrt of a negative
/// number, non-finite intermediate). Callers attach coordinates.
class ExpressionFault : public MathError {
public:
    using MathError::MathError;
};

/// f (or an expression) produced a non-finite value or hit a domain fault.
class EvaluationError : public MathError {
public:
    EvaluationError(std::size_t node, double x, const std::string& what)
        : MathError(what + " at node " + std::to_string(node) + " (x=" + std::to_string(x) + ")"),
          node_(node), x_(x) {}

    std::size_t node() const noexcept { return node_; }
    double x() const noexcept { return x_; }

private:
    std::size_t node_;
    double x_;
};

}  // namespace beamide
