#pragma once

#include <stdexcept>
#include <string>

namespace hrtdp {

// Raised when a run, generator, or table is configured inconsistently
// (e.g. H not divisible by h, a variant missing its auxiliary object).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a caller breaks an operation's precondition on its inputs
// (e.g. a terminal value mapping that does not cover a reachable state).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Raised when an operation needs a valid MDP and gets one that is not.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by the exhaustive lookahead oracle when an instance is too large.
class RefusalError : public std::runtime_error {
 public:
  explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hrtdp
