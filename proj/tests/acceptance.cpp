// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Takes several minutes on a single core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "generators.hpp"
#include "inar/kernel.hpp"
#include "inar/simulate.hpp"
#include "inar/study.hpp"
#include "oracles.hpp"

using namespace inar;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double centre, double tol) { return std::abs(v - centre) <= tol; }

std::vector<int> as_int(const std::vector<Count>& v) { return {v.begin(), v.end()}; }
std::vector<double> probs_of(const Pmf& g) { return {g.probs().begin(), g.probs().end()}; }

const StudyCell& cell(const StudyResult& r, const std::string& target, int n) {
  for (const auto& c : r.cells) {
    if (c.target == target && c.n == n) return c;
  }
  throw std::runtime_error("missing cell " + target);
}

StudyConfig study(Dgp dgp, std::vector<int> n_grid, int K, int B, std::vector<std::string> targets,
                  Method method = Method::SemiParametric) {
  StudyConfig cfg;
  cfg.dgp = dgp;
  cfg.n_grid = std::move(n_grid);
  cfg.K = K;
  cfg.B = B;
  cfg.method = method;
  cfg.targets.clear();
  for (const auto& t : targets) cfg.targets.push_back(Target::parse(t));
  cfg.optimizer.restarts = 1;
  return cfg;
}

StudyResult timed(const char* label, const StudyConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  StudyResult r = run_study(cfg);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("  [%s: %.0f s]\n%s", label, s, emit_table(r, TableFormat::Markdown).c_str());
  std::fflush(stdout);
  return r;
}

void kernel_checks() {
  gen::Engine e(9001);
  double worst_sum = 0.0, worst_post = 0.0, worst_score = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const InarModel m = gen::model(e, 2, 6);
    const auto past = gen::past(e, m.order(), 8);
    const std::vector<Count> pc(past.begin(), past.end());
    Count reach = m.innovations.max_support();
    for (Count v : pc) reach += v;
    double total = 0.0;
    for (Count x = 0; x <= reach; ++x) total += transition_probability(m, {pc, x});
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const InarModel m = gen::model(e, 1, 6);
    const Count prev = gen::integer(e, 0, 8);
    const Count cur = gen::integer(e, 0, prev + m.innovations.max_support());
    const Pmf post = innovation_posterior(m, {{prev}, cur});
    double total = 0.0;
    for (double v : post.probs()) total += v;
    worst_post = std::max(worst_post, std::abs(total - 1.0));
  }
  for (int trial = 0; trial < 50; ++trial) {
    InarModel m = gen::model(e, 2, 6);
    for (auto& a : m.alphas) a = std::clamp(a, 0.02, 0.9);
    RandomStream rng(SeedSpec(9002, {static_cast<std::uint64_t>(trial)}));
    const CountSeries s = simulate_inar(m, gen::integer(e, 5, 60), 20, rng);
    const auto score = score_alpha(m, s);
    const auto values = as_int(s.values());
    const auto g = probs_of(m.innovations);
    for (int i = 0; i < m.order(); ++i) {
      auto up = m.alphas, down = m.alphas;
      up[i] += 1e-6;
      down[i] -= 1e-6;
      const double fd =
          (oracle::loglik(up, g, values) - oracle::loglik(down, g, values)) / 2e-6 / s.n();
      worst_score = std::max(worst_score, std::abs(score[i] - fd));
    }
  }
  report(1, worst_sum <= 1e-10 && worst_post <= 1e-12 && worst_score <= 1e-4,
         fmt("max |sum-1| %.1e, max |posterior-1| %.1e, max |score-fd| %.1e", worst_sum,
             worst_post, worst_score));
}

void grid_checks() {
  gen::Engine e(9003);
  double worst_gap = -1e300;
  for (int trial = 0; trial < 20; ++trial) {
    RandomStream rng(SeedSpec(9004, {static_cast<std::uint64_t>(trial)}));
    const InarModel m{{gen::uniform(e, 0.1, 0.8)}, Pmf(gen::pmf(e, 3))};
    const int n = gen::integer(e, 8, 20);
    CountSeries s;
    do {
      s = simulate_inar(m, n, 20, rng);
    } while (s.is_constant() || support_bounds(s, 1).u_plus > 2);
    const FitResult fit = npmle_fit(s, 1);
    const double grid = oracle::npmle_grid_max(as_int(s.values()), support_bounds(s, 1).u_plus);
    worst_gap = std::max(worst_gap, grid - fit.loglik);
  }
  report(2, worst_gap <= 1e-3, fmt("max (grid - npmle) loglik gap %.2e", worst_gap));
}

}  // namespace

int main() {
  kernel_checks();
  grid_checks();

  const PoiInarDgp poi{1.0, 0.5};
  const NbInarDgp nb{2, 2.0 / 3.0, 0.5};

  const StudyResult table1 = timed("Poi, n 500/1000", study(poi, {500, 1000}, 250, 250, {"alpha", "G0"}));
  {
    const auto& a = cell(table1, "alpha", 500);
    const auto& g0 = cell(table1, "G0", 500);
    report(3, within(a.coverage, 0.932, 0.05) && within(a.avg_length, 0.147, 0.02) &&
                  within(g0.coverage, 0.914, 0.06),
           fmt("alpha coverage %.3f length %.3f, G0 coverage %.3f", a.coverage, a.avg_length,
               g0.coverage));
  }

  const StudyResult nb500 = timed("NB, n 500", study(nb, {500}, 250, 250, {"alpha"}));
  {
    const auto& a = cell(nb500, "alpha", 500);
    report(4, within(a.coverage, 0.946, 0.05) && within(a.avg_length, 0.130, 0.02),
           fmt("alpha coverage %.3f length %.3f", a.coverage, a.avg_length));
  }

  const StudyResult nb_poi =
      timed("NB, Poisson bootstrap", study(nb, {1000}, 200, 200, {"G0", "G1"}, Method::ParametricPoisson));
  {
    const auto& g0 = cell(nb_poi, "G0", 1000);
    const auto& g1 = cell(nb_poi, "G1", 1000);
    report(5, g0.coverage <= 0.05 && g1.coverage <= 0.05,
           fmt("G0 coverage %.3f, G1 coverage %.3f", g0.coverage, g1.coverage));
  }

  const StudyResult poi_pred = timed("Poi predictive", study(poi, {500}, 200, 200, {"predictive"}));
  const StudyResult arch_pred =
      timed("INARCH predictive", study(InarchDgp{0.5, 1.0}, {1000}, 200, 200, {"predictive"}));
  {
    const double p = cell(poi_pred, "predictive", 500).coverage;
    const double a = cell(arch_pred, "predictive", 1000).coverage;
    report(6, within(p, 0.938, 0.06) && a <= 0.70,
           fmt("Poi coverage %.3f, INARCH coverage %.3f", p, a));
  }

  const StudyResult poi_id =
      timed("Poi dispersion", study(poi, {1000}, 200, 200, {"id_innov", "id_obs"}));
  const StudyResult nb_id = timed("NB dispersion", study(nb, {1000}, 200, 200, {"id_innov"}));
  {
    const auto& pi = cell(poi_id, "id_innov", 1000);
    const auto& po = cell(poi_id, "id_obs", 1000);
    const auto& ni = cell(nb_id, "id_innov", 1000);
    report(7, within(pi.coverage, 0.942, 0.06) && within(po.coverage, 0.940, 0.06) &&
                  ni.avg_length > pi.avg_length,
           fmt("Poi id_innov coverage %.3f, id_obs coverage %.3f, length NB %.3f vs Poi %.3f",
               pi.coverage, po.coverage, ni.avg_length, pi.avg_length));
  }

  {
    const double ratio =
        cell(table1, "alpha", 1000).avg_length / cell(table1, "alpha", 500).avg_length;
    report(8, ratio >= 0.6 && ratio <= 0.85, fmt("length ratio n=1000 / n=500 %.3f", ratio));
  }

  {
    const StudyConfig cfg = study(nb, {200, 400}, 30, 60, {"alpha", "G0", "predictive", "id_innov", "id_obs"});
    const StudyResult first = run_study(cfg);
    const StudyResult second = run_study(cfg);
    RunOptions shuffled;
    shuffled.order.resize(cfg.n_grid.size() * cfg.K);
    std::iota(shuffled.order.begin(), shuffled.order.end(), std::size_t{0});
    gen::Engine e(9005);
    std::shuffle(shuffled.order.begin(), shuffled.order.end(), e);
    shuffled.exec.threads = 4;
    const StudyResult permuted = run_study(cfg, shuffled);
    bool same = true;
    for (auto format : {TableFormat::Csv, TableFormat::Markdown, TableFormat::Json}) {
      const std::string a = emit_table(first, format);
      same = same && a == emit_table(second, format) && a == emit_table(permuted, format);
    }
    report(9, same && first == permuted, same ? "reports byte-identical" : "reports differ");
  }

  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
