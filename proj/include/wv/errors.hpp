#ifndef WV_ERRORS_HPP
#define WV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wv {

/// Base class for all library errors. Subclasses map to CLI exit codes:
/// ConfigError -> 2, NumericalGuardError -> 3, IoError -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent configuration / input data.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Runtime numerical guard tripped (shock, hyperbolicity loss, blow-up, ...).
class NumericalGuardError : public Error {
public:
    using Error::Error;
};

/// Characteristics crossing / implicit root non-uniqueness.
class ShockError : public NumericalGuardError {
public:
    using NumericalGuardError::NumericalGuardError;
};

/// 1 - 2*alpha*p dropped below the configured floor b0.
class HyperbolicityError : public NumericalGuardError {
public:
    using NumericalGuardError::NumericalGuardError;
};

/// Non-finite field value, ill-conditioned fit, failed iteration, bad geometry.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class ConditioningError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// Requested level is not attained by the profile.
class LevelError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// Profile shape inconsistent with a pre-shock single-valued graph.
class ShapeError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace wv

#endif
