#pragma once

#include <stdexcept>
#include <string>

namespace lightlayers {

/// Base of every error raised for bad data or failed I/O. Programming errors
/// (invalid parameters) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace lightlayers
