#pragma once

#include <stdexcept>
#include <string>

namespace augforge {

/// Base class for all augforge errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid settings, parameters, or inputs detected before any work is done.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File system or codec failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Violation of trial/study state transitions.
class StateError : public Error {
public:
    using Error::Error;
};

/// Importance analysis cannot proceed (insufficient or degenerate data).
class AnalysisError : public Error {
public:
    using Error::Error;
};

/// Detection evaluation failure (unknown class, dangling image id).
class EvalError : public Error {
public:
    using Error::Error;
};

} // namespace augforge
