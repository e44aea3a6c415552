#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "inar/applications.hpp"
#include "inar/errors.hpp"
#include "inar/io.hpp"

using namespace inar;

namespace {

OptimizerConfig quick() {
  OptimizerConfig cfg;
  cfg.restarts = 1;
  return cfg;
}

}  // namespace

TEST_CASE("predictive probability examples") {
  const InarModel poi{{0.5}, make_pmf(PoissonFamily{1.0})};
  CHECK(predictive_probability(poi, {{0}, 0}) == poi.innovations(0));
  CHECK(predictive_probability(poi, {{0}, 2}) ==
        doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(0.25 * std::exp(-1.0) == doctest::Approx(0.09197).epsilon(1e-4));

  std::vector<Count> all;
  for (Count s = 0; s <= poi.innovations.max_support() + 3; ++s) all.push_back(s);
  CHECK(std::abs(predictive_probability(poi, {all, 3}) - 1.0) <= 1e-10);

  CHECK_THROWS_AS(predictive_probability(poi, {{}, 0}), ParameterError);
  CHECK_THROWS_AS(predictive_probability(poi, {{0, 0}, 0}), ParameterError);
  CHECK_THROWS_AS(predictive_probability(poi, {{-1}, 0}), ParameterError);
  CHECK_THROWS_AS(predictive_probability(InarModel{{0.2, 0.2}, poi.innovations}, {{0}, 0}),
                  ParameterError);
}

TEST_CASE("property: predictive probability is additive and bounded") {
  gen::Engine e(71);
  for (int trial = 0; trial < 200; ++trial) {
    const InarModel m = gen::model(e, 1, 6);
    const Count xn = gen::integer(e, 0, 6);
    std::vector<Count> a, b;
    for (Count s = 0; s <= xn + 6; ++s) (gen::integer(e, 0, 1) ? a : b).push_back(s);
    if (a.empty() || b.empty()) continue;
    std::vector<Count> both = a;
    both.insert(both.end(), b.begin(), b.end());
    const double pa = predictive_probability(m, {a, xn});
    const double pb = predictive_probability(m, {b, xn});
    const double pab = predictive_probability(m, {both, xn});
    CHECK(std::abs(pab - (pa + pb)) <= 1e-12);
    CHECK(pab <= 1.0);
    CHECK(pa >= 0.0);
  }
}

TEST_CASE("dispersion index examples") {
  CHECK(dispersion_innovations(Pmf::point_mass(3)) == 0.0);
  CHECK(dispersion_innovations(make_pmf(ExplicitFamily{{0.5, 0.5}})) == doctest::Approx(0.5));
  CHECK(std::abs(dispersion_innovations(make_pmf(NegBinFamily{2, 2.0 / 3.0})) - 1.5) <= 1e-6);
  CHECK(std::abs(dispersion_innovations(make_pmf(PoissonFamily{2.5})) - 1.0) <= 1e-9);
  CHECK_THROWS_AS(dispersion_innovations(Pmf::point_mass(0)), UndefinedDispersionError);

  for (double a : {0.0, 0.2, 0.5, 0.9}) CHECK(dispersion_observations(1.0, a) == 1.0);
  CHECK(dispersion_observations(1.5, 0.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(dispersion_observations(1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(dispersion_observations(1.0, -0.1), ParameterError);
}

TEST_CASE("property: observation index lies between one and the innovation index") {
  for (int i = 0; i <= 80; ++i) {
    const double id = i / 20.0;
    for (int j = 1; j < 100; ++j) {
      const double a = j / 100.0;
      const double x = dispersion_observations(id, a);
      if (id == 1.0) {
        CHECK(x == 1.0);
      } else {
        CHECK(x > std::min(id, 1.0));
        CHECK(x < std::max(id, 1.0));
      }
    }
  }
}

TEST_CASE("property: over-, equi- and underdispersion agree") {
  gen::Engine e(72);
  for (int trial = 0; trial < 500; ++trial) {
    const InarModel m{{gen::uniform(e, 0.0, 0.99)}, Pmf(gen::pmf(e, gen::integer(e, 2, 8)))};
    const auto pair = dispersion_indices(m);
    CHECK((pair.id_innovations > 1.0) == (pair.id_observations > 1.0));
    CHECK((pair.id_innovations < 1.0) == (pair.id_observations < 1.0));
    CHECK(pair.id_observations ==
          dispersion_observations(dispersion_innovations(m.innovations), m.alphas[0]));
  }
  const InarModel equi{{0.4}, make_pmf(ExplicitFamily{{0.25, 0.5, 0.25}})};
  CHECK(dispersion_indices(equi).id_innovations == doctest::Approx(0.5));
}

TEST_CASE("dispersion intervals share one draw set") {
  RandomStream rng(SeedSpec(73));
  const CountSeries s =
      simulate_inar(InarModel{{0.5}, make_pmf(NegBinFamily{2, 2.0 / 3.0})}, 400, 500, rng);
  const FitResult fit = npmle_fit(s, 1, quick());
  const auto est = dispersion_ci(s, fit, 60, 0.1, quick(), SeedSpec(74));
  const auto draws = sp_inar_bootstrap(s, fit, 60, quick(), SeedSpec(74));
  const auto again = dispersion_intervals(draws, 0.1);
  CHECK(est.innovations.ci.lower == again.innovations.ci.lower);
  CHECK(est.innovations.ci.upper == again.innovations.ci.upper);
  CHECK(est.observations.ci.lower == again.observations.ci.lower);
  CHECK(est.observations.ci.upper == again.observations.ci.upper);
  CHECK(est.innovations.b_effective == est.observations.b_effective);

  const auto point = dispersion_indices(fit.model);
  CHECK(est.innovations.point == point.id_innovations);
  CHECK(est.observations.point == point.id_observations);
  CHECK(est.observations.point ==
        dispersion_observations(est.innovations.point, fit.model.alphas[0]));
  CHECK(est.innovations.ci.level == doctest::Approx(0.9));
}

TEST_CASE("degenerate fits give zero-width intervals") {
  const CountSeries twos({2}, std::vector<Count>(40, 2));
  const FitResult fit = npmle_fit(twos, 1);
  REQUIRE(fit.degenerate);
  const auto disp = dispersion_ci(twos, fit, 20, 0.1, quick(), SeedSpec(75));
  CHECK(disp.innovations.point == 0.0);
  CHECK(disp.innovations.ci.lower == disp.innovations.ci.upper);

  const auto pred = predictive_ci(twos, fit, {{2}, 2}, 20, 0.1, quick(), SeedSpec(76));
  CHECK(pred.ci.lower == pred.point);
  CHECK(pred.ci.upper == pred.point);

  const CountSeries zeros({0}, std::vector<Count>(40, 0));
  CHECK_THROWS_AS(dispersion_ci(zeros, npmle_fit(zeros, 1), 10, 0.1, quick(), SeedSpec(77)),
                  UndefinedDispersionError);
}

TEST_CASE("predictive interval and json schema") {
  RandomStream rng(SeedSpec(78));
  const CountSeries s = simulate_inar(InarModel{{0.5}, make_pmf(PoissonFamily{1.0})}, 300, 500, rng);
  const FitResult fit = npmle_fit(s, 1, quick());
  const PredictiveTarget target{{0}, s.body().back()};
  const auto est = predictive_ci(s, fit, target, 50, 0.05, quick(), SeedSpec(79));
  CHECK(est.point == predictive_probability(fit.model, target));
  CHECK(est.ci.lower <= est.ci.upper);
  CHECK(est.b_effective == 50);
  const auto j = to_json(est);
  CHECK(j.at("target") == "predictive");
  CHECK(j.at("point").get<double>() == est.point);
  CHECK(j.at("ci").at("lower").get<double>() == est.ci.lower);
  CHECK(j.at("ci").at("upper").get<double>() == est.ci.upper);
  CHECK(j.at("ci").at("level").get<double>() == 0.95);
  CHECK(j.at("B_effective") == 50);
}
