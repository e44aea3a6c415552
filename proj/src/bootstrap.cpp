#include "inar/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "inar/errors.hpp"

namespace inar {
namespace {

using Refit = std::function<FitResult(const CountSeries&, const OptimizerConfig&)>;

BootstrapDraw make_draw(const FitResult& fit, const SeedSpec& seed) {
  BootstrapDraw draw;
  draw.seed = seed;
  if (!std::isfinite(fit.loglik)) {
    draw.flags.failed = true;
    return draw;
  }
  draw.alphas = fit.model.alphas;
  const auto probs = fit.model.innovations.probs();
  draw.pmf.assign(probs.begin(), probs.end());
  draw.lambda = fit.lambda;
  draw.flags.degenerate = fit.degenerate;
  draw.flags.not_converged = !fit.converged;
  return draw;
}

BootstrapDraws run_bootstrap(const CountSeries& series, const FitResult& fit, int B,
                             const OptimizerConfig& cfg, const SeedSpec& seed,
                             const BootstrapOptions& options, const Refit& refit) {
  if (B < 1) throw ParameterError("bootstrap: B must be at least 1");
  if (options.burn_in < 0) throw ParameterError("bootstrap: burn_in must be non-negative");
  if (!(options.max_failure_fraction >= 0.0 && options.max_failure_fraction <= 1.0))
    throw ParameterError("bootstrap: max_failure_fraction must lie in [0,1]");
  cfg.validate();
  if (!std::isfinite(fit.loglik))
    throw ParameterError("bootstrap: the fitted model has a non-finite log-likelihood");
  fit.model.validate(Validation::Permissive);

  const int n = series.n();
  BootstrapDraws out;
  out.b_count = B;
  out.origin = fit;
  out.draws.resize(static_cast<std::size_t>(B));

  parallel_for(static_cast<std::size_t>(B), options.exec, [&](std::size_t b) {
    const SeedSpec draw_seed = seed.child(b);
    try {
      RandomStream rng(draw_seed.child(0));
      const CountSeries star = simulate_inar(fit.model, n, options.burn_in, rng);
      OptimizerConfig draw_cfg = cfg;
      draw_cfg.seed = draw_seed.child(1);
      draw_cfg.record_trace = false;
      out.draws[b] = make_draw(refit(star, draw_cfg), draw_seed);
    } catch (const std::exception&) {
      BootstrapDraw failed;
      failed.seed = draw_seed;
      failed.flags.failed = true;
      out.draws[b] = std::move(failed);
    }
  });

  std::size_t width = 0;
  for (const auto& d : out.draws) {
    if (d.flags.failed) ++out.excluded_count;
    width = std::max(width, d.pmf.size());
  }
  for (auto& d : out.draws)
    if (!d.flags.failed) d.pmf.resize(width, 0.0);

  if (out.excluded_count > options.max_failure_fraction * B) {
    std::ostringstream msg;
    msg << "bootstrap: " << out.excluded_count << " of " << B << " refits failed";
    throw BootstrapError(msg.str());
  }
  return out;
}

}  // namespace

std::vector<double> BootstrapDraws::evaluate(
    const std::function<double(const BootstrapDraw&)>& fn) const {
  std::vector<double> values;
  values.reserve(draws.size());
  for (const auto& d : draws)
    if (!d.flags.failed) values.push_back(fn(d));
  return values;
}

BootstrapDraws sp_inar_bootstrap(const CountSeries& series, const FitResult& fit, int B,
                                 const OptimizerConfig& cfg, const SeedSpec& seed,
                                 const BootstrapOptions& options) {
  const int p = fit.model.order();
  if (series.presample_length() != p)
    throw InputError("bootstrap: presample length must equal the fitted order");
  return run_bootstrap(series, fit, B, cfg, seed, options,
                       [p](const CountSeries& s, const OptimizerConfig& c) {
                         return npmle_fit(s, p, c);
                       });
}

BootstrapDraws parametric_poi_bootstrap(const CountSeries& series, const FitResult& fit, int B,
                                        const OptimizerConfig& cfg, const SeedSpec& seed,
                                        const BootstrapOptions& options) {
  if (!fit.lambda) throw ParameterError("parametric bootstrap: fit carries no Poisson mean");
  if (fit.model.order() != 1 || series.presample_length() != 1)
    throw InputError("parametric bootstrap: requires an INAR(1) fit and one presample value");
  return run_bootstrap(series, fit, B, cfg, seed, options,
                       [](const CountSeries& s, const OptimizerConfig& c) {
                         return poisson_ml_fit(s, c);
                       });
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("quantile level must lie in (0,1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double size = static_cast<double>(sorted.size());
  // q * size slightly above an integer through rounding must not skip a rank.
  const double rank = std::ceil(q * size - 1e-9 * size);
  const auto idx = static_cast<std::size_t>(std::clamp(rank, 1.0, size));
  return sorted[idx - 1];
}

ConfidenceInterval hall_interval(double theta_hat, std::span<const double> star_values,
                                 double delta, std::string target) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("hall interval: delta must lie in (0,1)");
  if (!std::isfinite(theta_hat)) throw ParameterError("hall interval: non-finite estimate");
  std::vector<double> diffs;
  diffs.reserve(star_values.size());
  for (double v : star_values) {
    if (!std::isfinite(v)) throw ParameterError("hall interval: non-finite bootstrap value");
    diffs.push_back(v - theta_hat);
  }
  ConfidenceInterval ci;
  ci.lower = theta_hat - empirical_quantile(diffs, 1.0 - delta / 2.0);
  ci.upper = theta_hat - empirical_quantile(diffs, delta / 2.0);
  ci.level = 1.0 - delta;
  ci.target = std::move(target);
  return ci;
}

}  // namespace inar
