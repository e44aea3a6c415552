#include "inar/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "inar/errors.hpp"
#include "inar/numeric.hpp"

namespace inar {

namespace {

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// d/dprob of the Binomial(x, prob) masses: x [b_{x-1}(k-1) - b_{x-1}(k)].
std::vector<double> binomial_pmf_derivative(Count x, double prob) {
  std::vector<double> out(static_cast<std::size_t>(x) + 1, 0.0);
  if (x == 0) return out;
  const std::vector<double> lower = binomial_pmf(x - 1, prob);
  for (Count k = 0; k <= x; ++k) {
    const double left = k >= 1 ? lower[k - 1] : 0.0;
    const double right = k <= x - 1 ? lower[k] : 0.0;
    out[k] = x * (left - right);
  }
  return out;
}

// sum_s w(s) G(x_t - s) over the overlap of both supports.
double read_off(std::span<const double> thinned, const Pmf& g, Count current) {
  CompensatedSum acc;
  const Count s_max = std::min<Count>(current, static_cast<Count>(thinned.size()) - 1);
  const Count s_min = std::max<Count>(0, current - g.max_support());
  for (Count s = s_min; s <= s_max; ++s) acc.add(thinned[s] * g(current - s));
  return acc.value();
}

void require_order_one(const InarModel& model, const TransitionQuery& q, const char* what) {
  if (model.order() != 1 || q.past.size() != 1) {
    throw ParameterError(std::string(what) + ": only defined for p = 1");
  }
}

double binomial_coefficient(Count n, Count k) {
  double c = 1.0;
  for (Count i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

void binomial_pmf(Count x, double prob, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(x) + 1, 0.0);
  if (prob <= 0.0) {
    out.front() = 1.0;
    return;
  }
  if (prob >= 1.0) {
    out.back() = 1.0;
    return;
  }
  // Recurse away from the end whose mass is largest; fall back to log space
  // when that starting mass underflows.
  const bool from_top = prob > 0.5;
  const double start = from_top ? std::pow(prob, x) : std::pow(1.0 - prob, x);
  if (start > std::numeric_limits<double>::min() * 1e10) {
    if (!from_top) {
      const double ratio = prob / (1.0 - prob);
      out[0] = start;
      for (Count k = 0; k < x; ++k) out[k + 1] = out[k] * ratio * (x - k) / (k + 1);
    } else {
      const double ratio = (1.0 - prob) / prob;
      out[x] = start;
      for (Count k = x; k > 0; --k) out[k - 1] = out[k] * ratio * k / (x - k + 1);
    }
    return;
  }
  const double lp = std::log(prob);
  const double lq = std::log1p(-prob);
  const double lgx = std::lgamma(x + 1.0);
  for (Count k = 0; k <= x; ++k) {
    out[k] = std::exp(lgx - std::lgamma(k + 1.0) - std::lgamma(x - k + 1.0) + k * lp +
                      (x - k) * lq);
  }
}

std::vector<double> binomial_pmf(Count x, double prob) {
  std::vector<double> out;
  binomial_pmf(x, prob, out);
  return out;
}

std::vector<double> thinned_sum_pmf(std::span<const Count> past, std::span<const double> alphas) {
  if (past.size() != alphas.size()) {
    throw ParameterError("thinned_sum_pmf: past length must equal the model order");
  }
  std::vector<double> acc{1.0};
  for (std::size_t i = 0; i < past.size(); ++i) {
    acc = convolve(acc, binomial_pmf(past[i], alphas[i]));
  }
  return acc;
}

TransitionQuery query_at(const CountSeries& series, int t, int p) {
  TransitionQuery q;
  q.past.reserve(p);
  for (int i = 1; i <= p; ++i) q.past.push_back(series.at(t - i));
  q.current = series.at(t);
  return q;
}

double transition_probability(const InarModel& model, const TransitionQuery& q) {
  const std::vector<double> thinned = thinned_sum_pmf(q.past, model.alphas);
  return read_off(thinned, model.innovations, q.current);
}

double transition_probability_inar1(double alpha, const Pmf& innovations, Count previous,
                                    Count current) {
  CompensatedSum acc;
  for (Count j = 0; j <= std::min(current, previous); ++j) {
    acc.add(binomial_coefficient(previous, j) * std::pow(alpha, j) *
            std::pow(1.0 - alpha, previous - j) * innovations(current - j));
  }
  return acc.value();
}

double conditional_log_likelihood(const InarModel& model, const CountSeries& series) {
  const int p = model.order();
  if (series.presample_length() != p) {
    throw InputError("conditional_log_likelihood: presample length must equal p");
  }
  CompensatedSum acc;
  for (int t = 0; t <= series.n(); ++t) {
    const double prob = transition_probability(model, query_at(series, t, p));
    if (!(prob > 0.0)) return -std::numeric_limits<double>::infinity();
    acc.add(std::log(prob));
  }
  return acc.value();
}

std::vector<double> innovation_joint(const InarModel& model, const TransitionQuery& q) {
  require_order_one(model, q, "innovation_joint");
  const Count prev = q.past.front();
  const Count cur = q.current;
  const std::vector<double> bin = binomial_pmf(prev, model.alphas.front());
  std::vector<double> joint(static_cast<std::size_t>(cur) + 1, 0.0);
  for (Count j = std::max<Count>(0, cur - prev); j <= cur; ++j) {
    joint[j] = model.innovations(j) * bin[cur - j];
  }
  return joint;
}

Pmf innovation_posterior(const InarModel& model, const TransitionQuery& q) {
  std::vector<double> joint = innovation_joint(model, q);
  if (!(compensated_sum(joint) > 0.0)) {
    throw ConditioningError("innovation_posterior: transition has probability zero");
  }
  return Pmf(std::move(joint));
}

double conditional_expectation(const InarModel& model, const BoundedFunction& h,
                               const TransitionQuery& q) {
  const std::vector<double> joint = innovation_joint(model, q);
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t j = 0; j < joint.size(); ++j) {
    if (joint[j] == 0.0) continue;
    const double hj = h.fn(static_cast<Count>(j));
    if (std::abs(hj) > h.bound) {
      throw ParameterError("conditional_expectation: h exceeds its declared bound");
    }
    num.add(hj * joint[j]);
    den.add(joint[j]);
  }
  if (!(den.value() > 0.0)) {
    throw ConditioningError("conditional_expectation: transition has probability zero");
  }
  return num.value() / den.value();
}

std::vector<double> score_alpha(const InarModel& model, const CountSeries& series) {
  const int p = model.order();
  if (series.presample_length() != p) {
    throw InputError("score_alpha: presample length must equal p");
  }
  std::vector<CompensatedSum> acc(p);
  for (int t = 0; t <= series.n(); ++t) {
    const TransitionQuery q = query_at(series, t, p);
    std::vector<std::vector<double>> factors(p);
    for (int i = 0; i < p; ++i) factors[i] = binomial_pmf(q.past[i], model.alphas[i]);
    std::vector<double> full{1.0};
    for (const auto& f : factors) full = convolve(full, f);
    const double prob = read_off(full, model.innovations, q.current);
    if (!(prob > 0.0)) continue;
    for (int i = 0; i < p; ++i) {
      std::vector<double> partial = binomial_pmf_derivative(q.past[i], model.alphas[i]);
      for (int k = 0; k < p; ++k) {
        if (k != i) partial = convolve(partial, factors[k]);
      }
      acc[i].add(read_off(partial, model.innovations, q.current) / prob);
    }
  }
  const double scale = 1.0 / std::max(series.n(), 1);
  std::vector<double> out(p);
  for (int i = 0; i < p; ++i) out[i] = acc[i].value() * scale;
  return out;
}

SupportBounds support_bounds(const CountSeries& series, int p) {
  if (p < 1) throw ParameterError("support_bounds: p must be >= 1");
  if (series.presample_length() < p) {
    throw InputError("support_bounds: presample shorter than p");
  }
  std::int64_t min_excess = std::numeric_limits<std::int64_t>::max();
  Count u_plus = 0;
  for (int t = 0; t <= series.n(); ++t) {
    std::int64_t lagged = 0;
    for (int i = 1; i <= p; ++i) lagged += series.at(t - i);
    min_excess = std::min<std::int64_t>(min_excess, series.at(t) - lagged);
    u_plus = std::max(u_plus, series.at(t));
  }
  return {static_cast<Count>(std::max<std::int64_t>(0, min_excess)), u_plus};
}

}  // namespace inar
