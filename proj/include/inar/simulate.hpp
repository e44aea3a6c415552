#pragma once

#include "inar/model.hpp"
#include "inar/rng.hpp"

namespace inar {

inline constexpr int kDefaultBurnIn = 500;

/// alpha o x: number of survivors among x independent Bernoulli(alpha) trials.
/// Throws ParameterError unless alpha is in (0,1) and x >= 0.
Count binomial_thinning(double alpha, Count x, RandomStream& rng);

/// Binomial(x, prob) sample for prob in [0,1]: Bernoulli sum below 16 trials,
/// chunked CDF inversion above.
Count sample_binomial(Count x, double prob, RandomStream& rng);

/// Poisson(mean) sample by CDF inversion (split into pieces for large means).
Count sample_poisson(double mean, RandomStream& rng);

/// X_t = sum_i alpha_i o X_{t-i} + eps_t started from zeros. The first
/// `burn_in` generated values are discarded; the presample holds the last p
/// values preceding X_0. Coefficients must be interior (each in (0,1), sum
/// below one); the innovation law may be any pmf, so fitted laws with
/// G(0) in {0, 1} can be resampled.
CountSeries simulate_inar(const InarModel& model, int n, int burn_in, RandomStream& rng);

/// X_t | past ~ Poisson(beta + alpha X_{t-1}); one presample value.
CountSeries simulate_inarch(double alpha, double beta, int n, int burn_in, RandomStream& rng);

}  // namespace inar
