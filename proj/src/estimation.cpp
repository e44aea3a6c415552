#include "inar/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "inar/errors.hpp"
#include "inar/numeric.hpp"
#include "objective.hpp"

namespace inar {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr int kAlphaSteps = 4;
constexpr double kMinLambda = 1e-10;

bool improved_enough(double before, double after, double tol) {
  return (after - before) >= tol * std::max(std::abs(before), 1.0);
}

/// Euclidean projection onto {clip <= a_i <= 1-clip, sum a_i <= 1-clip}.
void project_alphas(std::vector<double>& a, double clip) {
  const double lo = clip;
  const double hi = 1.0 - clip;
  const double cap = 1.0 - clip;
  auto clamped_sum = [&](double mu) {
    double s = 0.0;
    for (double v : a) s += std::clamp(v - mu, lo, hi);
    return s;
  };
  if (clamped_sum(0.0) > cap) {
    double mu_lo = 0.0;
    double mu_hi = *std::max_element(a.begin(), a.end()) - lo;
    for (int it = 0; it < 200 && mu_hi - mu_lo > 1e-16; ++it) {
      const double mid = 0.5 * (mu_lo + mu_hi);
      (clamped_sum(mid) > cap ? mu_lo : mu_hi) = mid;
    }
    for (double& v : a) v = std::clamp(v - mu_hi, lo, hi);
    return;
  }
  for (double& v : a) v = std::clamp(v, lo, hi);
}

/// Norm of the score restricted to directions that stay feasible.
double projected_norm(std::span<const double> a, std::span<const double> grad, double clip) {
  double total = 0.0;
  for (double v : a) total += v;
  const bool at_cap = total >= 1.0 - clip - 1e-12;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double g = grad[i];
    if (a[i] <= clip && g < 0.0) g = 0.0;
    if ((a[i] >= 1.0 - clip || at_cap) && g > 0.0) g = 0.0;
    sq += g * g;
  }
  return std::sqrt(sq);
}

/// Sample autocovariances of all values (presample included).
std::vector<double> autocovariances(const std::vector<Count>& x, int max_lag) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  std::vector<double> gamma(max_lag + 1, 0.0);
  for (int h = 0; h <= max_lag; ++h) {
    double s = 0.0;
    for (std::size_t t = h; t < x.size(); ++t) s += (x[t] - mean) * (x[t - h] - mean);
    gamma[h] = s / n;
  }
  return gamma;
}

/// Solves the Yule-Walker system by Gaussian elimination with pivoting.
std::vector<double> yule_walker(const std::vector<double>& gamma, int p) {
  std::vector<std::vector<double>> m(p, std::vector<double>(p + 1));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m[i][j] = gamma[std::abs(i - j)];
    m[i][p] = gamma[i + 1];
  }
  for (int col = 0; col < p; ++col) {
    int pivot = col;
    for (int r = col + 1; r < p; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    if (std::abs(m[col][col]) < 1e-300) continue;
    for (int r = 0; r < p; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= p; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<double> a(p, 0.0);
  for (int i = 0; i < p; ++i) {
    a[i] = std::abs(m[i][i]) < 1e-300 ? 0.0 : m[i][p] / m[i][i];
  }
  return a;
}

std::vector<double> dense_support(const Pmf& g, SupportBounds bounds) {
  std::vector<double> dense(static_cast<std::size_t>(bounds.u_plus) + 1, 0.0);
  for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e) dense[e] = g(e);
  return dense;
}

struct Candidate {
  std::vector<double> alphas;
  std::vector<double> g;
  double loglik = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

struct Iterate {
  std::vector<double> alphas;
  std::vector<double> g;
  double loglik = -std::numeric_limits<double>::infinity();
};

/// One monotone block update: a few Armijo projected Newton-scaled gradient
/// steps in alpha,
/// then one multiplicative EM step in G on [u_-, u_+].
class BlockAscent {
 public:
  BlockAscent(detail::NpmleObjective& objective, const OptimizerConfig& cfg, std::size_t p,
              SupportBounds bounds)
      : objective_(objective), cfg_(cfg), bounds_(bounds), grad_(p), shifted_(p), trial_(p), g_next_(static_cast<std::size_t>(bounds.u_plus) + 1) {}

  Iterate operator()(Iterate x) {
    const std::size_t p = x.alphas.size();
    objective_.set_alpha(x.alphas);
    for (int inner = 0; inner < kAlphaSteps; ++inner) {
      objective_.gradient(x.g, grad_);
      newton_direction(x);
      bool accepted = false;
      double t = 1.0;
      for (int h = 0; h < kMaxHalvings && !accepted; ++h, t *= 0.5) {
        for (std::size_t i = 0; i < p; ++i) trial_[i] = x.alphas[i] + t * direction_[i];
        project_alphas(trial_, cfg_.alpha_clip);
        double ascent = 0.0;
        bool moved = false;
        for (std::size_t i = 0; i < p; ++i) {
          ascent += grad_[i] * (trial_[i] - x.alphas[i]);
          moved = moved || trial_[i] != x.alphas[i];
        }
        if (!moved) break;
        objective_.set_alpha(trial_);
        const double candidate = objective_.loglik(x.g);
        if (candidate >= x.loglik + kArmijo * ascent && candidate >= x.loglik) {
          x.alphas = trial_;
          x.loglik = candidate;
          accepted = true;
        }
      }
      objective_.set_alpha(x.alphas);
      if (!accepted) break;
    }

    objective_.em_step(x.g, g_next_);
    const double em_loglik = objective_.loglik(g_next_);
    if (em_loglik >= x.loglik) {
      x.g.swap(g_next_);
      x.loglik = em_loglik;
    }

    // Vertex-direction step towards the support point with the steepest
    // directional derivative; EM alone only grows small masses geometrically.
    objective_.directional(x.g, g_next_);
    Count vertex = bounds_.u_minus;
    for (Count e = bounds_.u_minus; e <= bounds_.u_plus; ++e) {
      if (g_next_[e] > g_next_[vertex]) vertex = e;
    }
    if (g_next_[vertex] > 1.0 + 1e-12) {
      std::copy(x.g.begin(), x.g.end(), g_next_.begin());
      const double vertex_loglik = objective_.vertex_step(g_next_, vertex);
      if (vertex_loglik >= x.loglik) {
        x.g.swap(g_next_);
        x.loglik = vertex_loglik;
      }
    }
    return x;
  }

 private:
  // Newton direction -H^{-1} grad from a forward-difference Hessian of the
  // analytic score; falls back to the curvature-scaled gradient when -H is
  // not positive definite. Leaves the objective at x.alphas.
  void newton_direction(const Iterate& x) {
    const std::size_t p = x.alphas.size();
    std::vector<double> hess(p * p);
    for (std::size_t j = 0; j < p; ++j) {
      trial_ = x.alphas;
      const double h = 1e-6 * std::max(x.alphas[j], 1e-3);
      trial_[j] += trial_[j] + h <= 1.0 - cfg_.alpha_clip ? h : -h;
      const double dh = trial_[j] - x.alphas[j];
      objective_.set_alpha(trial_);
      objective_.gradient(x.g, shifted_);
      for (std::size_t i = 0; i < p; ++i) hess[i * p + j] = (shifted_[i] - grad_[i]) / dh;
    }
    objective_.set_alpha(x.alphas);
    // Cholesky of -H (symmetrized).
    std::vector<double> l(p * p, 0.0);
    bool definite = true;
    for (std::size_t i = 0; i < p && definite; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double v = -0.5 * (hess[i * p + j] + hess[j * p + i]);
        for (std::size_t k = 0; k < j; ++k) v -= l[i * p + k] * l[j * p + k];
        if (i == j) {
          definite = v > 0.0 && std::isfinite(v);
          l[i * p + i] = definite ? std::sqrt(v) : 0.0;
        } else {
          l[i * p + j] = v / l[j * p + j];
        }
      }
    }
    direction_.assign(p, 0.0);
    if (definite) {
      std::vector<double> y(p);
      for (std::size_t i = 0; i < p; ++i) {
        double v = grad_[i];
        for (std::size_t k = 0; k < i; ++k) v -= l[i * p + k] * y[k];
        y[i] = v / l[i * p + i];
      }
      for (std::size_t i = p; i-- > 0;) {
        double v = y[i];
        for (std::size_t k = i + 1; k < p; ++k) v -= l[k * p + i] * direction_[k];
        direction_[i] = v / l[i * p + i];
      }
      return;
    }
    for (std::size_t i = 0; i < p; ++i) {
      direction_[i] = grad_[i] / std::max(std::abs(hess[i * p + i]), 1.0);
    }
  }

  detail::NpmleObjective& objective_;
  const OptimizerConfig& cfg_;
  SupportBounds bounds_;
  std::vector<double> grad_;
  std::vector<double> shifted_;
  std::vector<double> trial_;
  std::vector<double> direction_;
  std::vector<double> g_next_;
};

/// SQUAREM (S3) extrapolation x0 - 2 s r + s^2 v along the two block updates
/// x0 -> x1 -> x2. The step length is pulled back towards -1 (which
/// reproduces x2) until the point is feasible. Returns false when no
/// extrapolation beyond x2 is possible.
bool squarem_point(const Iterate& x0, const Iterate& x1, const Iterate& x2,
                   SupportBounds bounds, double clip, Iterate& out) {
  const std::size_t p = x0.alphas.size();
  double rr = 0.0;
  double vv = 0.0;
  auto accumulate = [&](double a0, double a1, double a2) {
    const double r = a1 - a0;
    const double v = a2 - 2.0 * a1 + a0;
    rr += r * r;
    vv += v * v;
  };
  for (std::size_t i = 0; i < p; ++i) accumulate(x0.alphas[i], x1.alphas[i], x2.alphas[i]);
  for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e) accumulate(x0.g[e], x1.g[e], x2.g[e]);
  if (!(rr > 0.0) || !(vv > 0.0)) return false;

  auto extrapolate = [](double s, double a0, double a1, double a2) {
    return a0 - 2.0 * s * (a1 - a0) + s * s * (a2 - 2.0 * a1 + a0);
  };
  out.alphas.resize(p);
  out.g.assign(x0.g.size(), 0.0);
  for (double s = -std::sqrt(rr / vv); s < -1.0 - 1e-3; s = 0.5 * (s - 1.0)) {
    bool feasible = true;
    double total = 0.0;
    for (std::size_t i = 0; i < p && feasible; ++i) {
      out.alphas[i] = extrapolate(s, x0.alphas[i], x1.alphas[i], x2.alphas[i]);
      total += out.alphas[i];
      feasible = out.alphas[i] >= clip && out.alphas[i] <= 1.0 - clip;
    }
    feasible = feasible && total <= 1.0 - clip;
    // G coordinates may land on the simplex boundary; the vertex step can
    // move mass back onto a zeroed support point.
    double mass = 0.0;
    for (Count e = bounds.u_minus; e <= bounds.u_plus && feasible; ++e) {
      out.g[e] = std::max(extrapolate(s, x0.g[e], x1.g[e], x2.g[e]), 0.0);
      mass += out.g[e];
    }
    if (!feasible || !(mass > 0.0)) continue;
    for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e) out.g[e] /= mass;
    return true;
  }
  return false;
}

Candidate ascend(detail::NpmleObjective& objective, std::vector<double> alphas,
                 std::vector<double> g, SupportBounds bounds, const OptimizerConfig& cfg) {
  Candidate out;
  BlockAscent update(objective, cfg, alphas.size(), bounds);

  Iterate x{std::move(alphas), std::move(g)};
  objective.set_alpha(x.alphas);
  x.loglik = objective.loglik(x.g);
  if (cfg.record_trace) out.trace.push_back(x.loglik);

  Iterate extrapolated;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const double start = x.loglik;
    Iterate x1 = update(x);
    Iterate x2 = update(x1);
    if (squarem_point(x, x1, x2, bounds, cfg.alpha_clip, extrapolated)) {
      objective.set_alpha(extrapolated.alphas);
      extrapolated.loglik = objective.loglik(extrapolated.g);
      if (std::isfinite(extrapolated.loglik)) {
        Iterate stabilized = update(std::move(extrapolated));
        if (stabilized.loglik > x2.loglik) x2 = std::move(stabilized);
      }
    }
    x = std::move(x2);

    if (cfg.record_trace) out.trace.push_back(x.loglik);
    out.iterations = iter;
    if (!improved_enough(start, x.loglik, cfg.tol)) {
      out.converged = true;
      break;
    }
  }
  out.alphas = std::move(x.alphas);
  out.g = std::move(x.g);
  out.loglik = x.loglik;
  return out;
}

FitResult degenerate_fit(const CountSeries& series, int p, const OptimizerConfig& cfg) {
  FitResult fit;
  fit.model.alphas.assign(p, cfg.alpha_clip);
  fit.model.innovations = Pmf::point_mass(series.at(0));
  fit.bounds = support_bounds(series, p);
  fit.loglik = conditional_log_likelihood(fit.model, series);
  fit.converged = true;
  fit.degenerate = true;
  fit.warnings.emplace_back("constant series: likelihood is flat in alpha");
  return fit;
}

void check_sample_size(const CountSeries& series, int p, SupportBounds bounds,
                       std::vector<std::string>& warnings) {
  const long needed = 5L * (p + bounds.width());
  if (series.n() + 1 < needed) {
    warnings.push_back("short series: " + std::to_string(series.n() + 1) +
                       " observations for " + std::to_string(p + bounds.width()) +
                       " free parameters");
  }
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iter < 1) throw ParameterError("optimizer: max_iter must be >= 1");
  if (!(tol > 0.0)) throw ParameterError("optimizer: tol must be > 0");
  if (restarts < 1) throw ParameterError("optimizer: restarts must be >= 1");
  if (!(alpha_clip > 0.0 && alpha_clip < 0.5)) {
    throw ParameterError("optimizer: alpha_clip must lie in (0, 0.5)");
  }
}

InarModel moment_init(const CountSeries& series, int p, double alpha_clip) {
  if (p < 1) throw ParameterError("moment_init: p must be >= 1");
  if (series.is_constant()) throw DegenerateSeriesError("moment_init: constant series");
  const std::vector<Count> values = series.values();
  std::vector<double> alphas = yule_walker(autocovariances(values, p), p);
  project_alphas(alphas, alpha_clip);

  const SupportBounds bounds = support_bounds(series, p);
  std::vector<double> counts(static_cast<std::size_t>(bounds.u_plus) + 1, 0.0);
  for (int t = 0; t <= series.n(); ++t) {
    double residual = series.at(t);
    for (int i = 1; i <= p; ++i) residual -= alphas[i - 1] * series.at(t - i);
    const auto e = std::clamp<double>(std::floor(residual), bounds.u_minus, bounds.u_plus);
    counts[static_cast<std::size_t>(e)] += 1.0;
  }
  const double width = bounds.width();
  const double floor = std::min(1e-6, 0.5 / width);
  const double total = series.n() + 1.0;
  for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e) {
    counts[e] = (1.0 - width * floor) * counts[e] / total + floor;
  }
  return InarModel{std::move(alphas), Pmf(std::move(counts))};
}

namespace {

/// Empirical pmf of X_0..X_n clamped to [u_-, u_+], mixed with a uniform floor.
std::vector<double> marginal_start(const CountSeries& series, const SupportBounds& bounds) {
  std::vector<double> g(static_cast<std::size_t>(bounds.u_plus) + 1, 0.0);
  const double share = 1.0 / static_cast<double>(series.body().size());
  for (Count x : series.body())
    g[static_cast<std::size_t>(std::clamp(x, bounds.u_minus, bounds.u_plus))] += 0.9 * share;
  for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e) g[e] += 0.1 / bounds.width();
  return g;
}

/// Improves g at fixed alpha with EM and vertex-direction steps; the problem
/// is concave in g, so a few steps rank alpha values reliably.
double polish_g(detail::NpmleObjective& objective, std::vector<double>& g,
                const SupportBounds& bounds, int steps) {
  std::vector<double> next(g.size()), dir(g.size());
  double ll = objective.loglik(g);
  for (int s = 0; s < steps; ++s) {
    const double before = ll;
    objective.em_step(g, next);
    const double em_ll = objective.loglik(next);
    if (em_ll >= ll) {
      g.swap(next);
      ll = em_ll;
    }
    objective.directional(g, dir);
    Count vertex = bounds.u_minus;
    for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e)
      if (dir[e] > dir[vertex]) vertex = e;
    if (dir[vertex] > 1.0 + 1e-12) {
      next = g;
      const double v_ll = objective.vertex_step(next, vertex);
      if (v_ll >= ll) {
        g.swap(next);
        ll = v_ll;
      }
    }
    if (!improved_enough(before, ll, 1e-10)) break;
  }
  return ll;
}

struct Start {
  std::vector<double> alphas;
  std::vector<double> g;
  double loglik;
};

/// Starting points along the ray through the moment coefficients. The total
/// thinning mass is scanned on a coarse grid with G profiled out; every
/// local peak of the scan is returned, best first. The likelihood is concave
/// in G but not in alpha, and short series often have separate modes.
std::vector<Start> profile_starts(detail::NpmleObjective& objective, const CountSeries& series,
                                  const InarModel& init, const SupportBounds& bounds,
                                  double clip) {
  const std::size_t p = init.alphas.size();
  std::vector<double> direction = init.alphas;
  const double total = std::accumulate(direction.begin(), direction.end(), 0.0);
  for (double& d : direction) d = total > 0.0 ? d / total : 1.0 / p;

  constexpr std::array<double, 11> kScales{0.01, 0.05, 0.1, 0.2, 0.3, 0.4,
                                           0.5,  0.6,  0.7, 0.8, 0.9};
  std::vector<Start> scan;
  for (double scale : kScales) {
    Start s{std::vector<double>(p), marginal_start(series, bounds), 0.0};
    for (std::size_t i = 0; i < p; ++i) s.alphas[i] = direction[i] * scale;
    project_alphas(s.alphas, clip);
    objective.set_alpha(s.alphas);
    s.loglik = polish_g(objective, s.g, bounds, 200);
    scan.push_back(std::move(s));
  }
  std::vector<Start> peaks;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const bool left = i == 0 || scan[i].loglik > scan[i - 1].loglik;
    const bool right = i + 1 == scan.size() || scan[i].loglik >= scan[i + 1].loglik;
    if (left && right) peaks.push_back(scan[i]);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Start& a, const Start& b) { return a.loglik > b.loglik; });
  return peaks;
}

}  // namespace

FitResult npmle_fit(const CountSeries& series, int p, const OptimizerConfig& cfg) {
  cfg.validate();
  if (p < 1) throw ParameterError("npmle_fit: p must be >= 1");
  if (series.presample_length() != p) {
    throw InputError("npmle_fit: presample length must equal p");
  }
  if (series.is_constant()) return degenerate_fit(series, p, cfg);

  const SupportBounds bounds = support_bounds(series, p);
  const detail::TransitionTable table = detail::TransitionTable::build(series, p);
  detail::NpmleObjective objective(table, bounds);
  const InarModel init = moment_init(series, p, cfg.alpha_clip);
  const std::vector<double> g0 = dense_support(init.innovations, bounds);

  std::vector<Start> peaks;
  if (cfg.restarts > 1) peaks = profile_starts(objective, series, init, bounds, cfg.alpha_clip);

  Candidate best;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<double> alphas = init.alphas;
    std::vector<double> g = g0;
    if (r >= 1 && static_cast<std::size_t>(r) <= peaks.size()) {
      alphas = peaks[r - 1].alphas;
      g = peaks[r - 1].g;
    } else if (r > 1) {
      RandomStream rng(cfg.seed.child(static_cast<std::uint64_t>(r)));
      for (double& a : alphas) a += 0.4 * (rng.uniform() - 0.5);
      project_alphas(alphas, cfg.alpha_clip);
      std::vector<double> w(g.size(), 0.0);
      double w_total = 0.0;
      for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e) {
        w[e] = 0.1 + rng.uniform();
        w_total += w[e];
      }
      for (Count e = bounds.u_minus; e <= bounds.u_plus; ++e) {
        g[e] = 0.5 * g[e] + 0.5 * w[e] / w_total;
      }
    }
    Candidate c = ascend(objective, std::move(alphas), std::move(g), bounds, cfg);
    if (c.loglik > best.loglik || r == 0) best = std::move(c);
  }

  FitResult fit;
  fit.bounds = bounds;
  fit.model = InarModel{best.alphas, Pmf(best.g)};
  fit.loglik = best.loglik;
  fit.iterations = best.iterations;
  fit.converged = best.converged;
  fit.trace = std::move(best.trace);
  check_sample_size(series, p, bounds, fit.warnings);

  std::vector<double> grad(p);
  objective.set_alpha(best.alphas);
  objective.gradient(best.g, grad);
  for (double& v : grad) v /= std::max(series.n(), 1);
  fit.grad_norm = projected_norm(best.alphas, grad, cfg.alpha_clip);
  return fit;
}

FitResult poisson_ml_fit(const CountSeries& series, const OptimizerConfig& cfg) {
  cfg.validate();
  if (series.presample_length() != 1) {
    throw InputError("poisson_ml_fit: presample length must equal 1");
  }
  const SupportBounds bounds = support_bounds(series, 1);
  if (series.is_constant()) {
    FitResult fit;
    const double lambda = std::max<double>(series.at(0), 1e-8);
    fit.model = InarModel{{cfg.alpha_clip}, make_pmf(PoissonFamily{lambda})};
    fit.lambda = lambda;
    fit.bounds = bounds;
    fit.loglik = conditional_log_likelihood(fit.model, series);
    fit.converged = true;
    fit.degenerate = true;
    fit.warnings.emplace_back("constant series: Poisson fit is degenerate");
    return fit;
  }

  const detail::TransitionTable table = detail::TransitionTable::build(series, 1);
  const detail::PoissonObjective objective(table, bounds.u_plus);
  const double lo = cfg.alpha_clip;
  const double hi = 1.0 - cfg.alpha_clip;

  const std::vector<Count> values = series.values();
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double alpha = std::clamp(yule_walker(autocovariances(values, 1), 1)[0], 0.05, 0.95);
  double lambda = std::max(mean * (1.0 - alpha), 1e-3);

  std::array<double, 2> grad{};
  double loglik = objective.evaluate(alpha, lambda, grad);
  FitResult fit;
  fit.bounds = bounds;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const double start = loglik;
    // Hessian by forward differences of the analytic gradient.
    const double ha = 1e-6 * std::max(alpha, 1e-3);
    const double hl = 1e-6 * std::max(lambda, 1e-3);
    std::array<double, 2> ga{};
    std::array<double, 2> gl{};
    objective.evaluate(alpha + ha <= hi ? alpha + ha : alpha - ha, lambda, ga);
    objective.evaluate(alpha, lambda + hl, gl);
    const double sa = alpha + ha <= hi ? ha : -ha;
    double h11 = (ga[0] - grad[0]) / sa;
    double h22 = (gl[1] - grad[1]) / hl;
    double h12 = 0.5 * ((ga[1] - grad[1]) / sa + (gl[0] - grad[0]) / hl);
    const double det = h11 * h22 - h12 * h12;

    double da = 0.0;
    double dl = 0.0;
    if (h11 < 0.0 && det > 0.0) {
      da = -(h22 * grad[0] - h12 * grad[1]) / det;
      dl = -(-h12 * grad[0] + h11 * grad[1]) / det;
    } else {
      da = grad[0] / std::max(std::abs(h11), 1.0);
      dl = grad[1] / std::max(std::abs(h22), 1.0);
    }

    bool accepted = false;
    double t = 1.0;
    for (int h = 0; h < kMaxHalvings && !accepted; ++h, t *= 0.5) {
      const double a_try = std::clamp(alpha + t * da, lo, hi);
      const double l_try = std::max(lambda + t * dl, kMinLambda);
      if (a_try == alpha && l_try == lambda) break;
      std::array<double, 2> g_try{};
      const double ll = objective.evaluate(a_try, l_try, g_try);
      if (ll >= loglik) {
        alpha = a_try;
        lambda = l_try;
        loglik = ll;
        grad = g_try;
        accepted = true;
      }
    }
    if (cfg.record_trace) fit.trace.push_back(loglik);
    fit.iterations = iter;
    if (!accepted || !improved_enough(start, loglik, cfg.tol)) {
      fit.converged = true;
      break;
    }
  }

  fit.model = InarModel{{alpha}, make_pmf(PoissonFamily{lambda})};
  fit.lambda = lambda;
  fit.loglik = loglik;
  const double scale = 1.0 / std::max(series.n(), 1);
  const std::array<double, 1> a{alpha};
  const std::array<double, 1> ga{grad[0] * scale};
  const double lambda_grad = lambda <= kMinLambda && grad[1] < 0.0 ? 0.0 : grad[1] * scale;
  fit.grad_norm = std::hypot(projected_norm(a, ga, cfg.alpha_clip), lambda_grad);
  return fit;
}

}  // namespace inar
