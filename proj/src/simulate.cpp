#include "inar/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "inar/errors.hpp"

namespace inar {

namespace {

// (0.5)^512 is still a normal double, so every chunk's inversion starts from a
// representable P(0).
constexpr Count kInversionChunk = 512;
constexpr Count kBernoulliCutoff = 16;

Count invert_binomial_chunk(Count x, double q, RandomStream& rng) {
  double u = rng.uniform();
  const double ratio = q / (1.0 - q);
  double pk = std::pow(1.0 - q, x);
  for (Count k = 0; k < x; ++k) {
    if (u < pk) return k;
    u -= pk;
    pk *= ratio * static_cast<double>(x - k) / static_cast<double>(k + 1);
  }
  return x;
}

}  // namespace

Count sample_binomial(Count x, double prob, RandomStream& rng) {
  if (x <= 0 || prob <= 0.0) return 0;
  if (prob >= 1.0) return x;
  if (x < kBernoulliCutoff) {
    Count s = 0;
    for (Count i = 0; i < x; ++i) s += rng.uniform() < prob ? 1 : 0;
    return s;
  }
  const bool flip = prob > 0.5;
  const double q = flip ? 1.0 - prob : prob;
  Count s = 0;
  for (Count remaining = x; remaining > 0; remaining -= kInversionChunk) {
    s += invert_binomial_chunk(std::min(remaining, kInversionChunk), q, rng);
  }
  return flip ? x - s : s;
}

Count binomial_thinning(double alpha, Count x, RandomStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("binomial_thinning: alpha must lie in (0,1)");
  }
  if (x < 0) throw ParameterError("binomial_thinning: x must be non-negative");
  return sample_binomial(x, alpha, rng);
}

Count sample_poisson(double mean, RandomStream& rng) {
  if (!(mean > 0.0)) return 0;
  constexpr double kPiece = 200.0;
  const int pieces = static_cast<int>(std::ceil(mean / kPiece));
  const double m = mean / pieces;
  Count total = 0;
  for (int i = 0; i < pieces; ++i) {
    double u = rng.uniform();
    double pk = std::exp(-m);
    Count k = 0;
    while (u >= pk && pk > 0.0) {
      u -= pk;
      ++k;
      pk *= m / k;
    }
    total += k;
  }
  return total;
}

CountSeries simulate_inar(const InarModel& model, int n, int burn_in, RandomStream& rng) {
  model.validate(Validation::Permissive);
  double alpha_sum = 0.0;
  for (double a : model.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ParameterError("simulate_inar: alpha must lie in (0,1)");
    alpha_sum += a;
  }
  if (!(alpha_sum < 1.0)) throw ParameterError("simulate_inar: alpha coefficients must sum below one");
  if (n < 1) throw ParameterError("simulate_inar: n must be >= 1");
  if (burn_in < 0) throw ParameterError("simulate_inar: burn_in must be >= 0");

  const int p = model.order();
  const std::size_t total = static_cast<std::size_t>(p) + burn_in + n + 1;
  std::vector<Count> x(total, 0);
  for (std::size_t t = p; t < total; ++t) {
    Count value = model.innovations.sample(rng);
    for (int i = 1; i <= p; ++i) value += sample_binomial(x[t - i], model.alphas[i - 1], rng);
    x[t] = value;
  }
  const auto body_begin = x.end() - (n + 1);
  return CountSeries({body_begin - p, body_begin}, {body_begin, x.end()});
}

CountSeries simulate_inarch(double alpha, double beta, int n, int burn_in, RandomStream& rng) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("simulate_inarch: alpha must lie in [0,1)");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("simulate_inarch: beta must be > 0");
  if (n < 1) throw ParameterError("simulate_inarch: n must be >= 1");
  if (burn_in < 0) throw ParameterError("simulate_inarch: burn_in must be >= 0");

  const std::size_t total = 1 + static_cast<std::size_t>(burn_in) + n + 1;
  std::vector<Count> x(total, 0);
  for (std::size_t t = 1; t < total; ++t) x[t] = sample_poisson(beta + alpha * x[t - 1], rng);
  const auto body_begin = x.end() - (n + 1);
  return CountSeries({body_begin - 1, body_begin}, {body_begin, x.end()});
}

}  // namespace inar
