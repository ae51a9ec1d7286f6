#pragma once

#include <stdexcept>
#include <string>

namespace moyal {

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct UnsupportedRegime : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResolutionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ConfigError : std::runtime_error {
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key(std::move(key)) {}
  std::string key;
};

}  // namespace moyal
