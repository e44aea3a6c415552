#pragma once

#include <functional>
#include <string>
#include <vector>

#include "inar/bootstrap.hpp"

namespace inar {

/// P(X_{n+1} in set | X_n = x_n).
struct PredictiveTarget {
  std::vector<Count> set;
  Count x_n = 0;

  /// Throws ParameterError for an empty set, negative or repeated values, or x_n < 0.
  void validate() const;
};

/// Point estimate and Hall interval of one functional, with the number of
/// bootstrap draws that entered the interval.
struct FunctionalEstimate {
  std::string target;
  double point = 0.0;
  ConfidenceInterval ci;
  int b_effective = 0;
  /// Draws left out because the refit failed or the functional was undefined.
  int excluded = 0;
};

/// Evaluates fn at the origin fit and at every usable draw, then builds the
/// Hall interval. Draws on which fn throws UndefinedDispersionError are
/// excluded; more than max_failure_fraction of B excluded is a BootstrapError.
FunctionalEstimate functional_interval(const BootstrapDraws& draws, std::string target,
                                       const std::function<double(const InarModel&)>& fn,
                                       double delta, double max_failure_fraction = 0.10);

/// Sum over s in the set of the one-step transition probability from x_n.
/// Requires an INAR(1) model.
double predictive_probability(const InarModel& model, const PredictiveTarget& target);

FunctionalEstimate predictive_interval(const BootstrapDraws& draws, const PredictiveTarget& target,
                                       double delta);

/// Semi-parametric bootstrap followed by predictive_interval.
FunctionalEstimate predictive_ci(const CountSeries& series, const FitResult& fit,
                                 const PredictiveTarget& target, int B, double delta,
                                 const OptimizerConfig& cfg, const SeedSpec& seed,
                                 const BootstrapOptions& options = {});

/// Variance over mean of the innovation law. Throws UndefinedDispersionError
/// when the mean is zero.
double dispersion_innovations(const Pmf& pmf);

/// (id_innov + alpha) / (1 + alpha) for alpha in [0,1).
double dispersion_observations(double id_innov, double alpha);

struct DispersionPair {
  double id_innovations = 0.0;
  double id_observations = 0.0;
};

/// Both indices of an INAR(1) model. This is the only place the observation
/// index is derived, so points and bootstrap values share one code path.
DispersionPair dispersion_indices(const InarModel& model);

struct DispersionEstimates {
  FunctionalEstimate innovations;
  FunctionalEstimate observations;
};

/// Both intervals from the same draw set.
DispersionEstimates dispersion_intervals(const BootstrapDraws& draws, double delta);

DispersionEstimates dispersion_ci(const CountSeries& series, const FitResult& fit, int B,
                                  double delta, const OptimizerConfig& cfg, const SeedSpec& seed,
                                  const BootstrapOptions& options = {});

}  // namespace inar
