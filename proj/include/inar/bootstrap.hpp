#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inar/estimation.hpp"
#include "inar/parallel.hpp"
#include "inar/simulate.hpp"

namespace inar {

struct DrawFlags {
  bool degenerate = false;
  bool not_converged = false;
  /// The refit threw or returned a non-finite log-likelihood; excluded.
  bool failed = false;
};

/// Parameter snapshot of one bootstrap refit.
struct BootstrapDraw {
  std::vector<double> alphas;
  /// Innovation pmf, zero-padded to the common length of the draw set.
  std::vector<double> pmf;
  std::optional<double> lambda;
  DrawFlags flags;
  SeedSpec seed;

  /// Only meaningful for draws that did not fail.
  [[nodiscard]] InarModel model() const { return InarModel{alphas, Pmf(pmf)}; }
};

struct BootstrapDraws {
  int b_count = 0;
  FitResult origin;
  /// Exactly b_count entries, ordered by draw index.
  std::vector<BootstrapDraw> draws;
  int excluded_count = 0;

  [[nodiscard]] int effective_count() const { return b_count - excluded_count; }

  /// fn evaluated on every non-failed draw, in draw order.
  [[nodiscard]] std::vector<double> evaluate(
      const std::function<double(const BootstrapDraw&)>& fn) const;
};

struct BootstrapOptions {
  int burn_in = kDefaultBurnIn;
  /// A bootstrap pass with a larger share of failed refits is rejected.
  double max_failure_fraction = 0.10;
  Execution exec;
};

/// Semi-parametric INAR bootstrap: draw b simulates X* of the original length
/// from (alpha_hat, G_hat) with fresh thinnings and eps* ~ G_hat, then refits
/// the NPMLE (support bounds recomputed from X*). Draw b uses
/// seed.child(b).child(0) for simulation and seed.child(b).child(1) for the
/// optimizer, so the result is independent of execution order.
/// Throws BootstrapError when more than max_failure_fraction of refits fail.
BootstrapDraws sp_inar_bootstrap(const CountSeries& series, const FitResult& fit, int B,
                                 const OptimizerConfig& cfg, const SeedSpec& seed,
                                 const BootstrapOptions& options = {});

/// Parametric Poisson INAR(1) bootstrap: eps* ~ Poisson(lambda_hat), refit by
/// poisson_ml_fit. Draws carry the truncated Poisson pmf of each refit.
BootstrapDraws parametric_poi_bootstrap(const CountSeries& series, const FitResult& fit, int B,
                                        const OptimizerConfig& cfg, const SeedSpec& seed,
                                        const BootstrapOptions& options = {});

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  /// Nominal coverage 1 - delta.
  double level = 0.95;
  std::string target;
};

/// Order statistic number ceil(q * size) (1-based) of the sorted values.
/// Throws InputError on empty input and ParameterError for q outside (0,1).
double empirical_quantile(std::span<const double> values, double q);

/// Hall interval [theta_hat - Q(1 - delta/2), theta_hat - Q(delta/2)], Q the
/// empirical quantiles of theta* - theta_hat.
ConfidenceInterval hall_interval(double theta_hat, std::span<const double> star_values,
                                 double delta, std::string target = {});

}  // namespace inar
