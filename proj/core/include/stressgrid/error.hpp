#pragma once

#include <stdexcept>
#include <string>

namespace stressgrid {

// Base for every error the library reports. Callers that only care about
// success/failure catch this; the CLI distinguishes the two subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration / input values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File system problems: missing inputs, unwritable output directories.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace stressgrid
