#pragma once

#include <stdexcept>
#include <string>

namespace ppp {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed flags, files, spec strings, invalid parameters.
class ValidationError : public Error
{
public:
  using Error::Error;
};

class ParseError : public ValidationError
{
public:
  using ValidationError::ValidationError;
};

class ZeroRangeError : public ValidationError
{
public:
  using ValidationError::ValidationError;
};

class SelectorError : public ValidationError
{
public:
  using ValidationError::ValidationError;
};

class UnknownColumnError : public ValidationError
{
public:
  using ValidationError::ValidationError;
};

class DegenerateDensityError : public Error
{
public:
  using Error::Error;
};

class InvalidStateError : public Error
{
public:
  using Error::Error;
};

class InitializationError : public Error
{
public:
  using Error::Error;
};

class GridError : public Error
{
public:
  using Error::Error;
};

} // namespace ppp
