#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "inar/rng.hpp"

namespace inar {

using Count = std::int32_t;

/// Probability mass function on the non-negative integers with a finite
/// stored prefix 0..max_support(); the implicit tail is exactly zero.
class Pmf {
 public:
  /// Point mass at zero.
  Pmf();

  /// Validates (every entry finite and >= 0, positive total) and renormalizes.
  /// Trailing zeros are trimmed, keeping at least one entry.
  explicit Pmf(std::vector<double> probs);

  static Pmf point_mass(Count k);

  [[nodiscard]] double operator()(std::int64_t k) const {
    return (k < 0 || k >= static_cast<std::int64_t>(probs_.size())) ? 0.0
                                                                     : probs_[k];
  }
  [[nodiscard]] std::span<const double> probs() const { return probs_; }
  [[nodiscard]] Count max_support() const {
    return static_cast<Count>(probs_.size()) - 1;
  }

  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;

  /// Inversion sampling against the cached CDF.
  [[nodiscard]] Count sample(RandomStream& rng) const;

  friend bool operator==(const Pmf& a, const Pmf& b) { return a.probs_ == b.probs_; }

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

struct PoissonFamily {
  double lambda;
};
/// P(k) = C(k+N-1, k) prob^N (1-prob)^k, mean N(1-prob)/prob.
struct NegBinFamily {
  int size;
  double prob;
};
/// P(k) = prob (1-prob)^k.
struct GeometricFamily {
  double prob;
};
struct ExplicitFamily {
  std::vector<double> probs;
};

using PmfFamily =
    std::variant<PoissonFamily, NegBinFamily, GeometricFamily, ExplicitFamily>;

inline constexpr double kDefaultTailTol = 1e-12;

/// Builds the shortest prefix whose omitted tail mass is below tail_tol and
/// renormalizes it. Explicit lists are taken as given (no truncation).
Pmf make_pmf(const PmfFamily& family, double tail_tol = kDefaultTailTol);

/// Exact Poisson mass, evaluated in log space.
double poisson_pmf(std::int64_t k, double lambda);

/// Exact negative binomial mass in the (size, prob) parameterization above.
double negbin_pmf(std::int64_t k, int size, double prob);

}  // namespace inar
