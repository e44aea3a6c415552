#pragma once

// Reference computations that share no code with the library: transition
// laws by enumerating every thinning outcome, likelihoods built from them,
// and brute-force grid maximizers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline double binom(int n, int k, double a) {
  if (k < 0 || k > n) return 0.0;
  return choose(n, k) * std::pow(a, k) * std::pow(1.0 - a, n - k);
}

inline double pois(int k, double lambda) {
  if (k < 0) return 0.0;
  double v = std::exp(-lambda);
  for (int i = 1; i <= k; ++i) v *= lambda / i;
  return v;
}

inline double at(const std::vector<double>& g, int k) {
  return (k < 0 || k >= static_cast<int>(g.size())) ? 0.0 : g[k];
}

/// P(X_t = cur | past) summing over all survivor vectors (j_1..j_p).
inline double transition(const std::vector<double>& alphas,
                         const std::function<double(int)>& innov, const std::vector<int>& past,
                         int cur) {
  const std::size_t p = alphas.size();
  std::vector<int> j(p, 0);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    int survivors = 0;
    for (std::size_t i = 0; i < p; ++i) {
      w *= binom(past[i], j[i], alphas[i]);
      survivors += j[i];
    }
    total += w * innov(cur - survivors);
    std::size_t i = 0;
    while (i < p && ++j[i] > past[i]) j[i++] = 0;
    if (i == p) break;
  }
  return total;
}

inline double transition(const std::vector<double>& alphas, const std::vector<double>& g,
                         const std::vector<int>& past, int cur) {
  return transition(alphas, [&](int k) { return at(g, k); }, past, cur);
}

/// values holds the presample (length p) followed by X_0..X_n.
inline double loglik(const std::vector<double>& alphas, const std::function<double(int)>& innov,
                     const std::vector<int>& values) {
  const std::size_t p = alphas.size();
  double ll = 0.0;
  for (std::size_t t = p; t < values.size(); ++t) {
    std::vector<int> past(p);
    for (std::size_t i = 0; i < p; ++i) past[i] = values[t - 1 - i];
    const double prob = transition(alphas, innov, past, values[t]);
    if (prob <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += std::log(prob);
  }
  return ll;
}

inline double loglik(const std::vector<double>& alphas, const std::vector<double>& g,
                     const std::vector<int>& values) {
  return loglik(alphas, [&](int k) { return at(g, k); }, values);
}

/// Maximum of the INAR(1) log-likelihood over alpha in {0, step, .., 1} and
/// G on the simplex over {0..u_plus} with the same step.
inline double npmle_grid_max(const std::vector<int>& values, int u_plus, double step = 0.02) {
  const int m = static_cast<int>(std::lround(1.0 / step));
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> c(u_plus + 1, 0);
  // Enumerate compositions of m into u_plus + 1 parts.
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == u_plus) {
      c[idx] = left;
      std::vector<double> g(u_plus + 1);
      for (int k = 0; k <= u_plus; ++k) g[k] = c[k] * step;
      for (int a = 0; a <= m; ++a)
        best = std::max(best, loglik({a * step}, g, values));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[idx] = v;
      rec(idx + 1, left - v);
    }
  };
  rec(0, m);
  return best;
}

/// Maximum of the Poisson INAR(1) log-likelihood on a rectangular grid.
inline double poisson_grid_max(const std::vector<int>& values, double lambda_max,
                               double step = 0.005) {
  double best = -std::numeric_limits<double>::infinity();
  for (double a = step; a < 1.0; a += step)
    for (double l = step; l <= lambda_max; l += step)
      best = std::max(best, loglik({a}, [&](int k) { return pois(k, l); }, values));
  return best;
}

/// Largest D with D > crit(level) rejecting equality of the two samples.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

/// Upper 0.001 quantiles of the chi-square law, df = 1..12.
inline double chi2_crit_001(int df) {
  static const double table[] = {10.828, 13.816, 16.266, 18.467, 20.515, 22.458,
                                 24.322, 26.124, 27.877, 29.588, 31.264, 32.909};
  return table[df - 1];
}

/// Pearson statistic after pooling cells with expected count below 5.
/// Returns {statistic, degrees of freedom}.
inline std::pair<double, int> chi_square(const std::vector<double>& observed,
                                         const std::vector<double>& expected) {
  std::vector<double> o, e;
  double oa = 0.0, ea = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    oa += observed[k];
    ea += expected[k];
    if (ea >= 5.0) {
      o.push_back(oa);
      e.push_back(ea);
      oa = ea = 0.0;
    }
  }
  if (ea > 0.0 || oa > 0.0) {
    if (e.empty()) {
      o.push_back(oa);
      e.push_back(ea);
    } else {
      o.back() += oa;
      e.back() += ea;
    }
  }
  double stat = 0.0;
  for (std::size_t k = 0; k < o.size(); ++k) stat += (o[k] - e[k]) * (o[k] - e[k]) / e[k];
  return {stat, static_cast<int>(o.size()) - 1};
}

}  // namespace oracle
