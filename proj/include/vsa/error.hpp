#pragma once

#include <stdexcept>
#include <string>

namespace vsa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or lengths of operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside its valid domain (K > N, alpha = 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Experiment / pipeline configuration could not be resolved.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver hit a numerically singular or non-finite state.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <class E = InvalidArgument>
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw E(msg);
}

}  // namespace detail

}  // namespace vsa
