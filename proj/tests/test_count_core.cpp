#include <doctest.h>

#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "inar/errors.hpp"
#include "inar/numeric.hpp"
#include "inar/pmf.hpp"
#include "inar/simulate.hpp"
#include "oracles.hpp"

using namespace inar;

namespace {

double sample_mean(const std::vector<Count>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_var(const std::vector<Count>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (Count x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

double lag1_acf(const std::vector<Count>& v) {
  const double m = sample_mean(v);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    den += (v[t] - m) * (v[t] - m);
    if (t > 0) num += (v[t] - m) * (v[t - 1] - m);
  }
  return num / den;
}

}  // namespace

TEST_CASE("explicit pmf is taken as given") {
  const Pmf g = make_pmf(ExplicitFamily{{0.5, 0.5}});
  CHECK(g(0) == 0.5);
  CHECK(g(1) == 0.5);
  CHECK(g.max_support() == 1);
  CHECK(g(2) == 0.0);
  CHECK(g(-1) == 0.0);
}

TEST_CASE("poisson(1) masses") {
  const Pmf g = make_pmf(PoissonFamily{1.0});
  CHECK(g(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(g(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(g(4) == doctest::Approx(std::exp(-1.0) / 24.0).epsilon(1e-12));
  // The reference value is reported to three decimals.
  CHECK(std::round(g(4) * 1000.0) / 1000.0 == 0.015);
}

TEST_CASE("negative binomial moments by brute force") {
  const Pmf g = make_pmf(NegBinFamily{2, 2.0 / 3.0});
  double m = 0.0, m2 = 0.0;
  for (int k = 0; k <= g.max_support(); ++k) {
    m += k * g(k);
    m2 += double(k) * k * g(k);
  }
  CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m2 - m * m == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(g.mean() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g.variance() == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("truncation keeps the shortest prefix with small tail") {
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    for (double lambda : {0.3, 1.0, 4.0}) {
      const Pmf g = make_pmf(PoissonFamily{lambda}, tol);
      const int K = g.max_support();
      double tail = 0.0, with_last = 0.0;
      for (int k = K + 1; k < K + 200; ++k) tail += oracle::pois(k, lambda);
      with_last = tail + oracle::pois(K, lambda);
      CHECK(tail < tol * 1.0001);
      CHECK(with_last >= tol * 0.9999);
    }
  }
}

TEST_CASE("make_pmf parameter errors") {
  CHECK_THROWS_AS(make_pmf(PoissonFamily{0.0}), ParameterError);
  CHECK_THROWS_AS(make_pmf(PoissonFamily{-1.0}), ParameterError);
  CHECK_THROWS_AS(make_pmf(NegBinFamily{0, 0.5}), ParameterError);
  CHECK_THROWS_AS(make_pmf(NegBinFamily{2, 1.0}), ParameterError);
  CHECK_THROWS_AS(make_pmf(GeometricFamily{0.0}), ParameterError);
  CHECK_THROWS_AS(make_pmf(PoissonFamily{1.0}, 1e-3), ParameterError);
  CHECK_THROWS_AS(make_pmf(PoissonFamily{1.0}, 0.0), ParameterError);
  CHECK_THROWS_AS(make_pmf(ExplicitFamily{{0.5, -0.1, 0.6}}), DomainError);
  CHECK_THROWS_AS(Pmf(std::vector<double>{0.0, 0.0}), DomainError);
}

TEST_CASE("geometric pmf") {
  const Pmf g = make_pmf(GeometricFamily{0.4});
  CHECK(g(0) == doctest::Approx(0.4));
  CHECK(g(2) == doctest::Approx(0.4 * 0.36));
}

TEST_CASE("property: pmf normalization and idempotence") {
  gen::Engine e(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> raw(gen::integer(e, 1, 30));
    for (auto& v : raw) v = gen::uniform(e, 0.0, 10.0);
    const Pmf g(raw);
    CHECK(std::abs(compensated_sum(g.probs()) - 1.0) <= 1e-12);
    for (double v : g.probs()) CHECK(v >= 0.0);
    const Pmf again(std::vector<double>(g.probs().begin(), g.probs().end()));
    for (int k = 0; k <= g.max_support(); ++k) CHECK(std::abs(again(k) - g(k)) <= 1e-15);
  }
}

TEST_CASE("seed specs") {
  const SeedSpec a(7);
  CHECK(a.child(1) == SeedSpec(7, {1}));
  CHECK_FALSE(a.child(1) == a.child(2));
  CHECK(a.child(1).derived_seed() != a.child(2).derived_seed());
  CHECK(a.child(1).child(2).derived_seed() != a.child(2).child(1).derived_seed());
  CHECK(SeedSpec(8).derived_seed() != a.derived_seed());
  RandomStream r1(a.child(3)), r2(a.child(3));
  for (int i = 0; i < 100; ++i) CHECK(r1.next() == r2.next());
}

TEST_CASE("binomial thinning basics") {
  RandomStream rng(SeedSpec(1));
  CHECK(binomial_thinning(0.5, 0, rng) == 0);
  CHECK_THROWS_AS(binomial_thinning(0.0, 3, rng), ParameterError);
  CHECK_THROWS_AS(binomial_thinning(1.0, 3, rng), ParameterError);
  CHECK_THROWS_AS(binomial_thinning(0.5, -1, rng), ParameterError);

  constexpr int draws = 100000;
  double sum = 0.0, ones = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Count v = binomial_thinning(0.5, 4, rng);
    CHECK(v <= 4);
    sum += v;
    ones += binomial_thinning(0.9, 1, rng);
  }
  CHECK(std::abs(sum / draws - 2.0) <= 3.0 * std::sqrt(1.0 / draws));
  CHECK(std::abs(ones / draws - 0.9) <= 3.0 * std::sqrt(0.09 / draws));
}

TEST_CASE("property: thinning matches the binomial law (chi-square, level 0.001)") {
  int site = 0;
  for (double alpha : {0.1, 0.5, 0.9}) {
    for (int x : {1, 4, 10}) {
      RandomStream rng(SeedSpec(2, {static_cast<std::uint64_t>(site++)}));
      constexpr int draws = 100000;
      std::vector<double> observed(x + 1, 0.0), expected(x + 1);
      for (int i = 0; i < draws; ++i) {
        const Count v = binomial_thinning(alpha, x, rng);
        REQUIRE(v >= 0);
        REQUIRE(v <= x);
        observed[v] += 1.0;
      }
      for (int k = 0; k <= x; ++k) expected[k] = draws * oracle::binom(x, k, alpha);
      const auto [stat, df] = oracle::chi_square(observed, expected);
      CAPTURE(alpha);
      CAPTURE(x);
      CHECK(stat < oracle::chi2_crit_001(df));
    }
  }
}

TEST_CASE("large binomial and poisson samplers have the right moments") {
  RandomStream rng(SeedSpec(3));
  constexpr int draws = 20000;
  for (double prob : {0.2, 0.7}) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double v = sample_binomial(1000, prob, rng);
      s += v;
      s2 += v * v;
    }
    const double mean = s / draws, var = s2 / draws - mean * mean;
    const double true_var = 1000 * prob * (1 - prob);
    CHECK(std::abs(mean - 1000 * prob) <= 4.0 * std::sqrt(true_var / draws));
    CHECK(var == doctest::Approx(true_var).epsilon(0.05));
  }
  for (double lambda : {0.5, 30.0, 450.0}) {
    double s = 0.0;
    for (int i = 0; i < draws; ++i) s += sample_poisson(lambda, rng);
    CHECK(std::abs(s / draws - lambda) <= 4.0 * std::sqrt(lambda / draws));
  }
}

TEST_CASE("simulate_inar examples") {
  RandomStream rng(SeedSpec(4));
  const auto zero = simulate_inar(InarModel{{0.5}, make_pmf(ExplicitFamily{{1.0}})}, 200, 50, rng);
  for (Count v : zero.values()) CHECK(v == 0);
  CHECK(zero.n() == 200);
  CHECK(zero.presample_length() == 1);

  const InarModel poi{{0.5}, make_pmf(PoissonFamily{1.0})};
  const auto long_run = simulate_inar(poi, 100000, 500, rng);
  // Long-run variance of the mean: var(X)(1 + alpha)/(1 - alpha) = 6.
  CHECK(std::abs(sample_mean(long_run.body()) - 2.0) <= 3.0 * std::sqrt(6.0 / 100000));

  const auto acf_run = simulate_inar(InarModel{{0.3}, make_pmf(PoissonFamily{1.0})}, 100000, 500, rng);
  CHECK(std::abs(lag1_acf(acf_run.body()) - 0.3) <= 0.02);

  const auto p2 = simulate_inar(InarModel{{0.3, 0.2}, make_pmf(PoissonFamily{1.0})}, 10, 5, rng);
  CHECK(p2.presample_length() == 2);
  CHECK(p2.body().size() == 11u);
}

TEST_CASE("simulate_inar rejects boundary coefficients") {
  RandomStream rng(SeedSpec(5));
  const Pmf g = make_pmf(PoissonFamily{1.0});
  CHECK_THROWS_AS(simulate_inar(InarModel{{0.0}, g}, 10, 0, rng), ParameterError);
  CHECK_THROWS_AS(simulate_inar(InarModel{{1.0}, g}, 10, 0, rng), ParameterError);
  CHECK_THROWS_AS(simulate_inar(InarModel{{0.6, 0.4}, g}, 10, 0, rng), ParameterError);
  CHECK_THROWS_AS(simulate_inar(InarModel{{0.5}, g}, 0, 0, rng), ParameterError);
  CHECK_THROWS_AS(simulate_inar(InarModel{{0.5}, g}, 10, -1, rng), ParameterError);
}

TEST_CASE("property: near-zero thinning reproduces the innovation law") {
  RandomStream rng(SeedSpec(6));
  const Pmf g = make_pmf(PoissonFamily{1.5});
  const auto s = simulate_inar(InarModel{{1e-6}, g}, 100000, 10, rng);
  std::vector<double> observed(g.max_support() + 1, 0.0), expected(g.max_support() + 1);
  for (Count v : s.body()) observed[std::min<int>(v, g.max_support())] += 1.0;
  for (int k = 0; k <= g.max_support(); ++k) expected[k] = g(k) * s.body().size();
  const auto [stat, df] = oracle::chi_square(observed, expected);
  CHECK(stat < oracle::chi2_crit_001(df));
}

TEST_CASE("simulation is deterministic in the seed") {
  const InarModel m{{0.4, 0.2}, make_pmf(NegBinFamily{2, 0.6})};
  RandomStream a(SeedSpec(9, {1, 2})), b(SeedSpec(9, {1, 2})), c(SeedSpec(9, {1, 3}));
  const auto sa = simulate_inar(m, 500, 100, a);
  const auto sb = simulate_inar(m, 500, 100, b);
  const auto sc = simulate_inar(m, 500, 100, c);
  CHECK(sa == sb);
  CHECK_FALSE(sa == sc);
}

TEST_CASE("simulate_inarch") {
  RandomStream rng(SeedSpec(7));
  const auto iid = simulate_inarch(0.0, 1.0, 100000, 100, rng);
  CHECK(std::abs(sample_mean(iid.body()) - 1.0) <= 3.0 * std::sqrt(1.0 / 100000));
  CHECK(std::abs(lag1_acf(iid.body())) <= 0.02);

  const auto s = simulate_inarch(0.5, 1.0, 100000, 500, rng);
  // Stationary variance 2 / 0.75, long-run factor (1 + a)/(1 - a) = 3.
  CHECK(std::abs(sample_mean(s.body()) - 2.0) <= 3.0 * std::sqrt(8.0 / 100000));

  int overdispersed = 0;
  for (int run = 0; run < 100; ++run) {
    const auto r = simulate_inarch(0.5, 1.0, 5000, 500, rng);
    overdispersed += sample_var(r.body()) > sample_mean(r.body()) ? 1 : 0;
  }
  CHECK(overdispersed >= 99);

  CHECK_THROWS_AS(simulate_inarch(1.0, 1.0, 10, 0, rng), ParameterError);
  CHECK_THROWS_AS(simulate_inarch(0.5, 0.0, 10, 0, rng), ParameterError);
}

TEST_CASE("model validation modes") {
  const Pmf g = make_pmf(PoissonFamily{1.0});
  CHECK_NOTHROW(InarModel({0.5}, g).validate(Validation::Strict));
  CHECK_THROWS_AS(InarModel({0.0}, g).validate(Validation::Strict), ParameterError);
  CHECK_THROWS_AS(InarModel({1.0}, g).validate(Validation::Strict), ParameterError);
  CHECK_THROWS_AS(InarModel({0.5, 0.5}, g).validate(Validation::Strict), ParameterError);
  CHECK_THROWS_AS(InarModel({0.5}, Pmf::point_mass(0)).validate(Validation::Strict), ParameterError);
  CHECK_THROWS_AS(InarModel({0.5}, Pmf::point_mass(2)).validate(Validation::Strict), ParameterError);
  CHECK_THROWS_AS(InarModel({}, g).validate(Validation::Strict), ParameterError);
  CHECK_NOTHROW(InarModel({0.0}, Pmf::point_mass(0)).validate(Validation::Permissive));
  CHECK_NOTHROW(InarModel({1.0}, g).validate(Validation::Permissive));
  CHECK_THROWS_AS(InarModel({1.2}, g).validate(Validation::Permissive), ParameterError);
}

TEST_CASE("count series invariants") {
  CHECK_THROWS_AS(CountSeries({1}, {}), InputError);
  CHECK_THROWS_AS(CountSeries({1}, {2, -1}), InputError);
  CHECK_THROWS_AS(CountSeries({-1}, {2}), InputError);
  const std::vector<Count> raw{2, 1, 3, 0};
  const auto s = CountSeries::from_values(raw, 1);
  CHECK(s.presample() == std::vector<Count>{2});
  CHECK(s.n() == 2);
  CHECK(s.at(-1) == 2);
  CHECK(s.at(2) == 0);
  CHECK(s.values() == raw);
  CHECK_FALSE(s.is_constant());
  CHECK(CountSeries::from_values(std::vector<Count>{3, 3, 3}, 1).is_constant());
  CHECK_THROWS_AS(CountSeries::from_values(std::vector<Count>{3}, 1), InputError);
}
