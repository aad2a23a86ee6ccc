#pragma once

#include <stdexcept>
#include <string>

namespace tgf {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor or vector shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Problems with input data (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class OrderingError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class SizeError : public DataError {
 public:
  using DataError::DataError;
};

class DomainError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateScaleError : public DataError {
 public:
  using DataError::DataError;
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

/// Wilcoxon test with every paired difference equal to zero.
class DegenerateTestError : public DataError {
 public:
  using DataError::DataError;
};

/// Non-finite values or a failed factorization (CLI exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {
template <class E, class... Rest>
[[noreturn]] void rethrow_prefixed(const std::string& prefix) {
  try {
    throw;
  } catch (const E& e) {
    throw E(prefix + e.what());
  } catch (...) {
    if constexpr (sizeof...(Rest) == 0) {
      throw;
    } else {
      rethrow_prefixed<Rest...>(prefix);
    }
  }
}
}  // namespace detail

/// Rethrows the active exception as the same library type with "stage: "
/// prepended to its message. Must be called from inside a catch block.
[[noreturn]] inline void rethrow_in_stage(const std::string& stage) {
  detail::rethrow_prefixed<DivergenceError, NumericalError, DegenerateTestError, AlignmentError,
                           DegenerateScaleError, DomainError, SizeError, ParseError, OrderingError,
                           SchemaError, DataError, ConfigError, DimensionError, Error>(stage + ": ");
}

}  // namespace tgf
