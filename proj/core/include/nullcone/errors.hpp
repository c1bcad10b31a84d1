#pragma once

#include <stdexcept>
#include <string>

namespace nullcone {

// Grid/spin/shape mismatches between values that must live on the same
// discretization.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Out-of-range caller parameters (off-grid nodes, a < 1, unknown norm names).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Inputs too degenerate to operate on (single-node time grids).
class DegenerateInputError : public std::invalid_argument {
 public:
  explicit DegenerateInputError(const std::string& what) : std::invalid_argument(what) {}
};

// Tensor ranks outside the supported r + l <= 2 envelope (plus internal rank-3
// intermediates).
class UnsupportedRankError : public std::invalid_argument {
 public:
  explicit UnsupportedRankError(const std::string& what) : std::invalid_argument(what) {}
};

// A cone data set is missing fields an operation needs.
class IncompleteDataError : public std::runtime_error {
 public:
  explicit IncompleteDataError(const std::string& what) : std::runtime_error(what) {}
};

// Physically inadmissible configuration (s0 <= 2m).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Expansion exceeded the configured ceiling during evolution.
class BlowupError : public std::runtime_error {
 public:
  explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nullcone
