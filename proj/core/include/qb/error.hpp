#pragma once

#include <stdexcept>
#include <string>

namespace qb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot support the requested computation. Exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace qb
