#include "inar/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "inar/errors.hpp"
#include "inar/numeric.hpp"

namespace inar {

namespace {

// Hard cap on truncated supports; far beyond anything the tail rule produces
// for the parameter ranges used in practice.
constexpr std::size_t kMaxSupport = 1 << 20;

Pmf truncated(double tail_tol, auto&& mass) {
  std::vector<double> probs;
  CompensatedSum total;
  for (std::size_t k = 0; k < kMaxSupport; ++k) {
    const double m = mass(static_cast<std::int64_t>(k));
    probs.push_back(m);
    total.add(m);
    if (1.0 - total.value() < tail_tol) break;
  }
  return Pmf(std::move(probs));
}

}  // namespace

Pmf::Pmf() : probs_{1.0}, cdf_{1.0} {}

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DomainError("pmf: empty probability vector");
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (!(probs_[k] >= 0.0) || !std::isfinite(probs_[k])) {
      throw DomainError("pmf: mass at " + std::to_string(k) +
                        " is negative or not finite");
    }
  }
  while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
  const double total = compensated_sum(probs_);
  if (!(total > 0.0)) throw DomainError("pmf: total mass is zero");
  for (double& p : probs_) p /= total;

  cdf_.resize(probs_.size());
  CompensatedSum acc;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    acc.add(probs_[k]);
    cdf_[k] = acc.value();
  }
  cdf_.back() = 1.0;
}

Pmf Pmf::point_mass(Count k) {
  if (k < 0) throw DomainError("pmf: point mass at negative value");
  std::vector<double> probs(static_cast<std::size_t>(k) + 1, 0.0);
  probs.back() = 1.0;
  return Pmf(std::move(probs));
}

double Pmf::mean() const {
  CompensatedSum acc;
  for (std::size_t k = 0; k < probs_.size(); ++k) acc.add(k * probs_[k]);
  return acc.value();
}

double Pmf::variance() const {
  const double mu = mean();
  CompensatedSum acc;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    const double d = static_cast<double>(k) - mu;
    acc.add(d * d * probs_[k]);
  }
  return acc.value();
}

Count Pmf::sample(RandomStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto k = std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                          static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
  return static_cast<Count>(k);
}

double poisson_pmf(std::int64_t k, double lambda) {
  if (k < 0) return 0.0;
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double negbin_pmf(std::int64_t k, int size, double prob) {
  if (k < 0) return 0.0;
  const double log_choose =
      std::lgamma(k + size) - std::lgamma(k + 1.0) - std::lgamma(double(size));
  return std::exp(log_choose + size * std::log(prob) + k * std::log1p(-prob));
}

Pmf make_pmf(const PmfFamily& family, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol <= 1e-6)) {
    throw ParameterError("make_pmf: tail_tol must lie in (0, 1e-6]");
  }
  return std::visit(
      [tail_tol](const auto& f) -> Pmf {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, PoissonFamily>) {
          if (!(f.lambda > 0.0) || !std::isfinite(f.lambda)) {
            throw ParameterError("make_pmf: Poisson lambda must be > 0");
          }
          return truncated(tail_tol, [&](std::int64_t k) { return poisson_pmf(k, f.lambda); });
        } else if constexpr (std::is_same_v<F, NegBinFamily>) {
          if (f.size < 1) throw ParameterError("make_pmf: NegBin size must be a positive integer");
          if (!(f.prob > 0.0 && f.prob < 1.0)) {
            throw ParameterError("make_pmf: NegBin prob must lie in (0,1)");
          }
          return truncated(tail_tol,
                           [&](std::int64_t k) { return negbin_pmf(k, f.size, f.prob); });
        } else if constexpr (std::is_same_v<F, GeometricFamily>) {
          if (!(f.prob > 0.0 && f.prob < 1.0)) {
            throw ParameterError("make_pmf: Geometric prob must lie in (0,1)");
          }
          return truncated(tail_tol, [&](std::int64_t k) { return negbin_pmf(k, 1, f.prob); });
        } else {
          return Pmf(f.probs);
        }
      },
      family);
}

}  // namespace inar
