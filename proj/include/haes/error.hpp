#pragma once

#include <stdexcept>
#include <string>

namespace haes {

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A ModelRepo (or its on-disk form) violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad user-supplied configuration (selector configs, behavior specs, flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem or parse failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace haes
