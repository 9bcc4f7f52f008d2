#pragma once

#include <stdexcept>
#include <string>

namespace scma {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent dimensions (K, J, M, N, vector lengths, graph shape).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// User, symbol or resource index out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured point or pair budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (negative intensity, zero power, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class UnderflowError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (missing stop rule, empty sweep, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed codebook or input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace scma
