#pragma once

#include <stdexcept>

namespace inar {

/// A numeric parameter lies outside its admissible domain (alpha, lambda, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid probability mass (negative entries, zero total).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or unusable input data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Conditioning on an event of probability zero.
class ConditioningError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A constant series carries no information for moment initialization.
class DegenerateSeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too many bootstrap refits failed for the quantiles to be trusted.
class BootstrapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dispersion index of a distribution with zero mean.
class UndefinedDispersionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace inar
