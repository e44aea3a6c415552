#pragma once

#include <functional>
#include <span>
#include <vector>

#include "inar/model.hpp"

namespace inar {

/// One transition: past = (x_{t-1}, ..., x_{t-p}) and current = x_t.
struct TransitionQuery {
  std::vector<Count> past;
  Count current = 0;
};

/// The NPMLE innovation pmf lives on {u_minus, ..., u_plus}.
struct SupportBounds {
  Count u_minus = 0;
  Count u_plus = 0;

  [[nodiscard]] Count width() const { return u_plus - u_minus + 1; }
  friend bool operator==(const SupportBounds&, const SupportBounds&) = default;
};

/// A bounded test function h on N_0 together with its declared sup-norm.
struct BoundedFunction {
  std::function<double(Count)> fn;
  double bound = 1.0;
};

/// Binomial(x, prob) masses 0..x for prob in [0,1].
std::vector<double> binomial_pmf(Count x, double prob);

/// Same, written into `out` (resized to x+1).
void binomial_pmf(Count x, double prob, std::vector<double>& out);

/// Law of sum_i alpha_i o x_i as masses 0..sum(x_i): iterated convolution of
/// the p binomial laws.
std::vector<double> thinned_sum_pmf(std::span<const Count> past, std::span<const double> alphas);

/// Query for time t of `series` under order p.
TransitionQuery query_at(const CountSeries& series, int t, int p);

/// P(X_t = current | past): (Bin(x_{t-1},a_1) * ... * Bin(x_{t-p},a_p) * G){x_t}.
/// Zero when x_t is unreachable.
double transition_probability(const InarModel& model, const TransitionQuery& q);

/// INAR(1) transition written as the explicit sum over survivors
/// j = 0..min(x_t, x_{t-1}) of C(x_{t-1}, j) a^j (1-a)^{x_{t-1}-j} G(x_t - j).
double transition_probability_inar1(double alpha, const Pmf& innovations, Count previous,
                                    Count current);

/// Sum over t = 0..n of log P(X_t | X_{t-1}, ..., X_{t-p}); -infinity as soon
/// as one transition is impossible. The presample length must equal p.
double conditional_log_likelihood(const InarModel& model, const CountSeries& series);

/// Joint masses P(eps_t = j, X_t = x_t | X_{t-1} = x_{t-1}) for j = 0..x_t.
/// p = 1 only.
std::vector<double> innovation_joint(const InarModel& model, const TransitionQuery& q);

/// Posterior of eps_t given (X_{t-1}, X_t). p = 1 only; throws
/// ConditioningError when the transition has probability zero.
Pmf innovation_posterior(const InarModel& model, const TransitionQuery& q);

/// E(h(eps_t) | X_t, X_{t-1}) as the ratio
/// sum_s h(x_t - s) Bin(s) G(x_t - s) / sum_s Bin(s) G(x_t - s).
/// Throws ParameterError when h exceeds its declared bound on the support.
double conditional_expectation(const InarModel& model, const BoundedFunction& h,
                               const TransitionQuery& q);

/// (1/n) sum_t d/d alpha log P for each coefficient, from the analytic
/// derivative of the binomial convolution. Impossible transitions contribute 0.
std::vector<double> score_alpha(const InarModel& model, const CountSeries& series);

/// u_- = max{0, min_t (X_t - sum_i X_{t-i})}, u_+ = max_t X_t over t = 0..n.
SupportBounds support_bounds(const CountSeries& series, int p);

}  // namespace inar
