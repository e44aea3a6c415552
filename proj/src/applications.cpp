#include "inar/applications.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "inar/errors.hpp"
#include "inar/kernel.hpp"
#include "inar/numeric.hpp"

namespace inar {

void PredictiveTarget::validate() const {
  if (set.empty()) throw ParameterError("predictive target: the set S is empty");
  if (x_n < 0) throw ParameterError("predictive target: x_n must be non-negative");
  std::vector<Count> sorted = set;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0) throw ParameterError("predictive target: S holds a negative value");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("predictive target: S holds a repeated value");
}

FunctionalEstimate functional_interval(const BootstrapDraws& draws, std::string target,
                                       const std::function<double(const InarModel&)>& fn,
                                       double delta, double max_failure_fraction) {
  FunctionalEstimate out;
  out.point = fn(draws.origin.model);
  std::vector<double> stars;
  stars.reserve(draws.draws.size());
  int excluded = 0;
  for (const auto& d : draws.draws) {
    if (d.flags.failed) {
      ++excluded;
      continue;
    }
    try {
      stars.push_back(fn(d.model()));
    } catch (const UndefinedDispersionError&) {
      ++excluded;
    }
  }
  if (excluded > max_failure_fraction * draws.b_count || stars.empty()) {
    std::ostringstream msg;
    msg << target << ": " << excluded << " of " << draws.b_count << " draws unusable";
    throw BootstrapError(msg.str());
  }
  out.ci = hall_interval(out.point, stars, delta, target);
  out.b_effective = static_cast<int>(stars.size());
  out.excluded = excluded;
  out.target = std::move(target);
  return out;
}

double predictive_probability(const InarModel& model, const PredictiveTarget& target) {
  if (model.order() != 1) throw ParameterError("predictive probability requires p = 1");
  target.validate();
  CompensatedSum acc;
  for (Count s : target.set)
    acc.add(transition_probability(model, TransitionQuery{{target.x_n}, s}));
  return std::min(acc.value(), 1.0);
}

FunctionalEstimate predictive_interval(const BootstrapDraws& draws, const PredictiveTarget& target,
                                       double delta) {
  target.validate();
  return functional_interval(
      draws, "predictive",
      [&](const InarModel& m) { return predictive_probability(m, target); }, delta);
}

FunctionalEstimate predictive_ci(const CountSeries& series, const FitResult& fit,
                                 const PredictiveTarget& target, int B, double delta,
                                 const OptimizerConfig& cfg, const SeedSpec& seed,
                                 const BootstrapOptions& options) {
  if (fit.model.order() != 1) throw ParameterError("predictive_ci requires p = 1");
  target.validate();
  return predictive_interval(sp_inar_bootstrap(series, fit, B, cfg, seed, options), target, delta);
}

double dispersion_innovations(const Pmf& pmf) {
  const double mu = pmf.mean();
  if (!(mu > 0.0)) throw UndefinedDispersionError("dispersion index undefined for a zero-mean law");
  return pmf.variance() / mu;
}

double dispersion_observations(double id_innov, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw ParameterError("dispersion_observations: alpha must lie in [0,1)");
  return (id_innov + alpha) / (1.0 + alpha);
}

DispersionPair dispersion_indices(const InarModel& model) {
  if (model.order() != 1) throw ParameterError("dispersion indices require p = 1");
  DispersionPair out;
  out.id_innovations = dispersion_innovations(model.innovations);
  out.id_observations = dispersion_observations(out.id_innovations, model.alphas[0]);
  return out;
}

DispersionEstimates dispersion_intervals(const BootstrapDraws& draws, double delta) {
  DispersionEstimates out;
  out.innovations = functional_interval(
      draws, "id_innov",
      [](const InarModel& m) { return dispersion_indices(m).id_innovations; }, delta);
  out.observations = functional_interval(
      draws, "id_obs",
      [](const InarModel& m) { return dispersion_indices(m).id_observations; }, delta);
  return out;
}

DispersionEstimates dispersion_ci(const CountSeries& series, const FitResult& fit, int B,
                                  double delta, const OptimizerConfig& cfg, const SeedSpec& seed,
                                  const BootstrapOptions& options) {
  if (fit.model.order() != 1) throw ParameterError("dispersion_ci requires p = 1");
  return dispersion_intervals(sp_inar_bootstrap(series, fit, B, cfg, seed, options), delta);
}

}  // namespace inar
