#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Density base c^2 is nonpositive (or the isothermal exponent left the
/// representable range) at some state.
class VacuumError : public Error {
public:
  VacuumError(const std::string& what, std::ptrdiff_t i = -1, std::ptrdiff_t j = -1)
      : Error(what), i_(i), j_(j) {}
  std::ptrdiff_t i() const { return i_; }
  std::ptrdiff_t j() const { return j_; }
  bool has_node() const { return i_ >= 0; }

private:
  std::ptrdiff_t i_;
  std::ptrdiff_t j_;
};

class OverflowError : public Error {
public:
  using Error::Error;
};

class NotEllipticError : public Error {
public:
  using Error::Error;
};

class GridError : public Error {
public:
  using Error::Error;
};

class GridMismatchError : public GridError {
public:
  using GridError::GridError;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class InadmissibleError : public Error {
public:
  using Error::Error;
};

class MaxIterError : public Error {
public:
  using Error::Error;
};

class BreakdownError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace conflow
