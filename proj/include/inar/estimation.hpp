#pragma once

#include <optional>
#include <string>
#include <vector>

#include "inar/kernel.hpp"
#include "inar/model.hpp"
#include "inar/rng.hpp"

namespace inar {

struct OptimizerConfig {
  int max_iter = 5000;
  /// Stop once one outer iteration improves the log-likelihood by less than
  /// tol * max(|loglik|, 1).
  double tol = 1e-8;
  int restarts = 3;
  SeedSpec seed{kDefaultSeed};
  /// Coefficients are kept in [alpha_clip, 1 - alpha_clip] with
  /// sum <= 1 - alpha_clip.
  double alpha_clip = 1e-6;
  /// Keep the per-iteration log-likelihood of the winning restart.
  bool record_trace = false;

  void validate() const;
};

struct FitResult {
  InarModel model;
  SupportBounds bounds;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Norm of the projected score (1/n scaling) at the returned point.
  double grad_norm = 0.0;
  /// Constant input series: flat likelihood, point-mass innovations.
  bool degenerate = false;
  /// Set by the parametric Poisson fit only.
  std::optional<double> lambda;
  std::vector<std::string> warnings;
  std::vector<double> trace;

  /// Converged and not degenerate.
  [[nodiscard]] bool clean() const { return converged && !degenerate; }
};

/// Yule-Walker coefficients clipped into the interior, with G0 the floored
/// empirical pmf of the pseudo-residuals X_t - sum_i a_i X_{t-i}, clamped to
/// [u_-, u_+] and mixed with a 1e-6 floor so every entry stays positive.
/// Throws DegenerateSeriesError for a constant series.
InarModel moment_init(const CountSeries& series, int p, double alpha_clip = 1e-6);

/// Non-parametric maximum likelihood over (alpha, G) with G supported on
/// [u_-, u_+]. Alternates a Newton-scaled projected-gradient step in alpha
/// (Armijo backtracking) with an EM step and a vertex-direction step in G,
/// accelerated by SQUAREM extrapolation that is kept only when it improves;
/// the log-likelihood never decreases.
/// Restart 0 starts from moment_init; the next restarts start from the local
/// peaks of a coarse profile scan over the total thinning mass (best first),
/// any remaining ones from random perturbations of the moment estimates; the best log-likelihood wins,
/// ties going to the lowest restart index. The presample length must equal p.
FitResult npmle_fit(const CountSeries& series, int p, const OptimizerConfig& cfg = {});

/// Conditional ML for the Poisson INAR(1) model, jointly in (alpha, lambda),
/// by projected damped Newton. The reported innovations are Poisson(lambda)
/// truncated at the default tail tolerance.
FitResult poisson_ml_fit(const CountSeries& series, const OptimizerConfig& cfg = {});

}  // namespace inar
