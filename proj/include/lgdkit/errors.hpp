#pragma once

#include <stdexcept>
#include <string>

namespace lgdkit {

/// Base class for all toolkit errors.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration: unknown series names, invalid specs, malformed
/// windows or fold plans. CLI exit code 2.
class config_error : public error {
  public:
    using error::error;
};

/// Bad data: malformed CSV rows, empty samples, shape mismatches,
/// all-censored responses. CLI exit code 3.
class data_error : public error {
  public:
    using error::error;
};

/// Argument outside an operation's mathematical domain.
class domain_error : public data_error {
  public:
    using data_error::data_error;
};

/// Numerical failure: singular information matrix, non-convergence
/// treated as fatal. CLI exit code 4.
class numeric_error : public error {
  public:
    using error::error;
};

}  // namespace lgdkit
