#include "objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "inar/errors.hpp"
#include "inar/numeric.hpp"

namespace inar::detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> binomial_derivative(Count x, double prob) {
  std::vector<double> out(static_cast<std::size_t>(x) + 1, 0.0);
  if (x == 0) return out;
  const std::vector<double> lower = binomial_pmf(x - 1, prob);
  for (Count k = 0; k <= x; ++k) {
    out[k] = x * ((k >= 1 ? lower[k - 1] : 0.0) - (k < x ? lower[k] : 0.0));
  }
  return out;
}

}  // namespace

TransitionTable TransitionTable::build(const CountSeries& series, int p) {
  if (series.presample_length() != p) {
    throw InputError("transition table: presample length must equal p");
  }
  std::map<std::vector<Count>, std::size_t> past_index;
  std::map<std::pair<std::size_t, Count>, double> counts;
  for (int t = 0; t <= series.n(); ++t) {
    std::vector<Count> past(p);
    for (int i = 1; i <= p; ++i) past[i - 1] = series.at(t - i);
    auto [it, inserted] = past_index.try_emplace(std::move(past), past_index.size());
    counts[{it->second, series.at(t)}] += 1.0;
  }
  TransitionTable table;
  table.p = p;
  table.pasts.resize(past_index.size());
  for (auto& [past, index] : past_index) table.pasts[index] = past;
  for (const auto& [key, weight] : counts) {
    table.cells.push_back({key.first, key.second, weight});
    table.total_weight += weight;
  }
  return table;
}

NpmleObjective::NpmleObjective(const TransitionTable& table, SupportBounds bounds)
    : table_(table), bounds_(bounds) {}

void NpmleObjective::set_alpha(std::span<const double> alphas) {
  alphas_.assign(alphas.begin(), alphas.end());
  const int p = table_.p;
  thinned_.resize(table_.pasts.size());
  derivative_.resize(table_.pasts.size());
  for (std::size_t k = 0; k < table_.pasts.size(); ++k) {
    const auto& past = table_.pasts[k];
    auto& deriv = derivative_[k];
    deriv.resize(p);
    if (p == 1) {
      binomial_pmf(past[0], alphas_[0], thinned_[k]);
      deriv[0] = binomial_derivative(past[0], alphas_[0]);
      continue;
    }
    std::vector<std::vector<double>> factors(p);
    for (int i = 0; i < p; ++i) factors[i] = binomial_pmf(past[i], alphas_[i]);
    std::vector<double> full{1.0};
    for (const auto& f : factors) full = convolve(full, f);
    thinned_[k] = std::move(full);
    for (int i = 0; i < p; ++i) {
      std::vector<double> partial = binomial_derivative(past[i], alphas_[i]);
      for (int j = 0; j < p; ++j) {
        if (j != i) partial = convolve(partial, factors[j]);
      }
      deriv[i] = std::move(partial);
    }
  }
}

double NpmleObjective::cell_probability(std::size_t c, std::span<const double> g) const {
  const auto& cell = table_.cells[c];
  const auto& thinned = thinned_[cell.past];
  const Count s_lo = std::max<Count>(0, cell.current - bounds_.u_plus);
  const Count s_hi = std::min<Count>(cell.current - bounds_.u_minus,
                                     static_cast<Count>(thinned.size()) - 1);
  double prob = 0.0;
  for (Count s = s_lo; s <= s_hi; ++s) prob += thinned[s] * g[cell.current - s];
  return prob;
}

double NpmleObjective::loglik(std::span<const double> g) const {
  CompensatedSum acc;
  for (std::size_t c = 0; c < table_.cells.size(); ++c) {
    const double prob = cell_probability(c, g);
    if (!(prob > 0.0)) return kNegInf;
    acc.add(table_.cells[c].weight * std::log(prob));
  }
  return acc.value();
}

double NpmleObjective::gradient(std::span<const double> g, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  CompensatedSum acc;
  for (std::size_t c = 0; c < table_.cells.size(); ++c) {
    const auto& cell = table_.cells[c];
    const double prob = cell_probability(c, g);
    if (!(prob > 0.0)) return kNegInf;
    acc.add(cell.weight * std::log(prob));
    for (int i = 0; i < table_.p; ++i) {
      const auto& d = derivative_[cell.past][i];
      const Count s_lo = std::max<Count>(0, cell.current - bounds_.u_plus);
      const Count s_hi = std::min<Count>(cell.current - bounds_.u_minus,
                                         static_cast<Count>(d.size()) - 1);
      double dp = 0.0;
      for (Count s = s_lo; s <= s_hi; ++s) dp += d[s] * g[cell.current - s];
      grad[i] += cell.weight * dp / prob;
    }
  }
  return acc.value();
}

double NpmleObjective::em_step(std::span<const double> g, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  CompensatedSum acc;
  for (std::size_t c = 0; c < table_.cells.size(); ++c) {
    const auto& cell = table_.cells[c];
    const auto& thinned = thinned_[cell.past];
    const double prob = cell_probability(c, g);
    if (!(prob > 0.0)) {
      std::copy(g.begin(), g.end(), out.begin());
      return kNegInf;
    }
    acc.add(cell.weight * std::log(prob));
    const double scale = cell.weight / prob;
    const Count s_lo = std::max<Count>(0, cell.current - bounds_.u_plus);
    const Count s_hi = std::min<Count>(cell.current - bounds_.u_minus,
                                       static_cast<Count>(thinned.size()) - 1);
    for (Count s = s_lo; s <= s_hi; ++s) out[cell.current - s] += scale * thinned[s];
  }
  CompensatedSum total;
  for (Count e = bounds_.u_minus; e <= bounds_.u_plus; ++e) {
    out[e] *= g[e];
    total.add(out[e]);
  }
  const double norm = total.value();
  for (Count e = bounds_.u_minus; e <= bounds_.u_plus; ++e) out[e] /= norm;
  return acc.value();
}

void NpmleObjective::directional(std::span<const double> g, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < table_.cells.size(); ++c) {
    const auto& cell = table_.cells[c];
    const auto& thinned = thinned_[cell.past];
    const double prob = cell_probability(c, g);
    if (!(prob > 0.0)) continue;
    const double scale = cell.weight / (prob * table_.total_weight);
    const Count s_lo = std::max<Count>(0, cell.current - bounds_.u_plus);
    const Count s_hi = std::min<Count>(cell.current - bounds_.u_minus,
                                       static_cast<Count>(thinned.size()) - 1);
    for (Count s = s_lo; s <= s_hi; ++s) out[cell.current - s] += scale * thinned[s];
  }
}

double NpmleObjective::vertex_step(std::span<double> g, Count vertex) const {
  const std::size_t m = table_.cells.size();
  std::vector<double> prob(m);
  std::vector<double> towards(m);
  for (std::size_t c = 0; c < m; ++c) {
    const auto& cell = table_.cells[c];
    const auto& thinned = thinned_[cell.past];
    prob[c] = cell_probability(c, g);
    const Count s = cell.current - vertex;
    towards[c] = (s >= 0 && s < static_cast<Count>(thinned.size())) ? thinned[s] : 0.0;
  }
  auto slope = [&](double t, double* curvature) {
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const double diff = towards[c] - prob[c];
      const double mix = prob[c] + t * diff;
      d1 += table_.cells[c].weight * diff / mix;
      d2 -= table_.cells[c].weight * diff * diff / (mix * mix);
    }
    if (curvature != nullptr) *curvature = d2;
    return d1;
  };
  // Safeguarded Newton on the concave slope over [0, t_hi].
  double lo = 0.0;
  double hi = 1.0 - 1e-12;
  double t = 0.0;
  if (slope(0.0, nullptr) > 0.0) {
    if (slope(hi, nullptr) >= 0.0) {
      t = hi;
    } else {
      t = 0.5 * hi;
      for (int it = 0; it < 60; ++it) {
        double d2 = 0.0;
        const double d1 = slope(t, &d2);
        (d1 > 0.0 ? lo : hi) = t;
        double next = d2 < 0.0 ? t - d1 / d2 : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) < 1e-14) {
          t = next;
          break;
        }
        t = next;
      }
    }
  }
  if (t > 0.0) {
    for (Count e = bounds_.u_minus; e <= bounds_.u_plus; ++e) g[e] *= 1.0 - t;
    g[vertex] += t;
  }
  return loglik(g);
}

PoissonObjective::PoissonObjective(const TransitionTable& table, Count u_plus)
    : table_(table), u_plus_(u_plus) {
  for (const auto& past : table_.pasts) max_past_ = std::max(max_past_, past[0]);
}

double PoissonObjective::evaluate(double alpha, double lambda, std::span<double> grad) const {
  // Poisson masses 0..u_+ and their lambda-derivative P(k-1) - P(k).
  std::vector<double> pois(static_cast<std::size_t>(u_plus_) + 1);
  for (Count k = 0; k <= u_plus_; ++k) pois[k] = poisson_pmf(k, lambda);
  std::vector<double> dpois(pois.size());
  for (Count k = 0; k <= u_plus_; ++k) dpois[k] = (k > 0 ? pois[k - 1] : 0.0) - pois[k];

  std::vector<std::vector<double>> thinned(table_.pasts.size());
  std::vector<std::vector<double>> dthinned(table_.pasts.size());
  for (std::size_t k = 0; k < table_.pasts.size(); ++k) {
    binomial_pmf(table_.pasts[k][0], alpha, thinned[k]);
    if (!grad.empty()) dthinned[k] = binomial_derivative(table_.pasts[k][0], alpha);
  }

  CompensatedSum acc;
  double ga = 0.0;
  double gl = 0.0;
  for (const auto& cell : table_.cells) {
    const auto& th = thinned[cell.past];
    const Count s_hi = std::min<Count>(cell.current, static_cast<Count>(th.size()) - 1);
    double prob = 0.0;
    double dpa = 0.0;
    double dpl = 0.0;
    for (Count s = 0; s <= s_hi; ++s) {
      const Count e = cell.current - s;
      prob += th[s] * pois[e];
      if (!grad.empty()) {
        dpa += dthinned[cell.past][s] * pois[e];
        dpl += th[s] * dpois[e];
      }
    }
    if (!(prob > 0.0)) {
      if (!grad.empty()) grad[0] = grad[1] = 0.0;
      return kNegInf;
    }
    acc.add(cell.weight * std::log(prob));
    ga += cell.weight * dpa / prob;
    gl += cell.weight * dpl / prob;
  }
  if (!grad.empty()) {
    grad[0] = ga;
    grad[1] = gl;
  }
  return acc.value();
}

}  // namespace inar::detail
