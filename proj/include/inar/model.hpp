#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "inar/pmf.hpp"

namespace inar {

/// Strict mode enforces the stationary interior: every alpha in (0,1),
/// sum < 1 and 0 < G(0) < 1. Permissive mode admits the closed box [0,1]^p
/// (with sum <= 1) used by optimizer iterates and fitted boundary solutions.
enum class Validation { Strict, Permissive };

/// INAR(p) parameter theta = (alpha, G).
struct InarModel {
  std::vector<double> alphas;
  Pmf innovations;

  [[nodiscard]] int order() const { return static_cast<int>(alphas.size()); }

  /// Throws ParameterError when the model violates the requested regime.
  void validate(Validation mode = Validation::Strict) const;
};

/// Observed counts (X_{-p}, ..., X_{-1}), X_0, ..., X_n.
class CountSeries {
 public:
  CountSeries() = default;
  CountSeries(std::vector<Count> presample, std::vector<Count> body);

  /// Splits a flat list: the first `presample_len` values form the presample.
  static CountSeries from_values(std::span<const Count> values, int presample_len);

  [[nodiscard]] const std::vector<Count>& presample() const { return presample_; }
  [[nodiscard]] const std::vector<Count>& body() const { return body_; }

  /// n, the index of the last observation (body holds n+1 values).
  [[nodiscard]] int n() const { return static_cast<int>(body_.size()) - 1; }
  [[nodiscard]] int presample_length() const { return static_cast<int>(presample_.size()); }

  /// X_t for t in [-presample_length(), n()].
  [[nodiscard]] Count at(int t) const {
    return t < 0 ? presample_[presample_.size() + t] : body_[t];
  }

  /// Presample followed by body.
  [[nodiscard]] std::vector<Count> values() const;

  [[nodiscard]] bool is_constant() const;

  friend bool operator==(const CountSeries&, const CountSeries&) = default;

 private:
  std::vector<Count> presample_;
  std::vector<Count> body_;
};

}  // namespace inar
