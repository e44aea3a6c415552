#include "inar/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "inar/errors.hpp"
#include "inar/numeric.hpp"

namespace inar {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Exact INAR model of the DGP; the innovation law is truncated at the
/// default tail tolerance where it has infinite support.
InarModel dgp_model(const Dgp& dgp) {
  return std::visit(
      Overloaded{
          [](const PoiInarDgp& d) {
            return InarModel{{d.alpha}, make_pmf(PoissonFamily{d.lambda})};
          },
          [](const NbInarDgp& d) {
            return InarModel{{d.alpha}, make_pmf(NegBinFamily{d.size, d.prob})};
          },
          [](const ExplicitInarDgp& d) { return InarModel{{d.alpha}, Pmf(d.probs)}; },
          [](const InarchDgp&) -> InarModel {
            throw ParameterError("INARCH is not an INAR model");
          },
      },
      dgp);
}

void validate_dgp(const Dgp& dgp) {
  auto unit = [](double a) { return a > 0.0 && a < 1.0; };
  std::visit(Overloaded{
                 [&](const PoiInarDgp& d) {
                   if (!(d.lambda > 0.0) || !std::isfinite(d.lambda) || !unit(d.alpha))
                     throw ParameterError("poi_inar: need lambda > 0 and alpha in (0,1)");
                 },
                 [&](const NbInarDgp& d) {
                   if (d.size < 1 || !unit(d.prob) || !unit(d.alpha))
                     throw ParameterError("nb_inar: need size >= 1, prob and alpha in (0,1)");
                 },
                 [&](const InarchDgp& d) {
                   if (!(d.alpha >= 0.0 && d.alpha < 1.0) || !(d.beta > 0.0) ||
                       !std::isfinite(d.beta))
                     throw ParameterError("inarch: need alpha in [0,1) and beta > 0");
                 },
                 [&](const ExplicitInarDgp& d) {
                   if (!unit(d.alpha)) throw ParameterError("explicit_inar: alpha must lie in (0,1)");
                   (void)Pmf(d.probs);
                 },
             },
             dgp);
}

struct TargetOutcome {
  bool ok = false;
  bool covered = false;
  double length = 0.0;
};

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string Target::name() const {
  switch (kind) {
    case Kind::Alpha:
      return "alpha";
    case Kind::G:
      return "G" + std::to_string(k);
    case Kind::Predictive:
      return "predictive";
    case Kind::IdInnovations:
      return "id_innov";
    case Kind::IdObservations:
      return "id_obs";
  }
  return "unknown";
}

Target Target::parse(const std::string& name) {
  if (name == "alpha") return {Kind::Alpha, 0};
  if (name == "predictive") return {Kind::Predictive, 0};
  if (name == "id_innov") return {Kind::IdInnovations, 0};
  if (name == "id_obs") return {Kind::IdObservations, 0};
  std::string digits;
  if (name.size() >= 2 && name[0] == 'G') {
    digits = name.substr(1);
    if (digits.size() >= 3 && digits.front() == '(' && digits.back() == ')')
      digits = digits.substr(1, digits.size() - 2);
  }
  if (!digits.empty() && digits.size() <= 4 &&
      digits.find_first_not_of("0123456789") == std::string::npos)
    return {Kind::G, std::stoi(digits)};
  throw ParameterError("unknown target '" + name + "'");
}

void StudyConfig::validate() const {
  validate_dgp(dgp);
  if (n_grid.empty()) throw ParameterError("study: n_grid is empty");
  std::set<int> seen;
  for (int n : n_grid) {
    if (n < 2) throw ParameterError("study: every n must be at least 2");
    if (!seen.insert(n).second) throw ParameterError("study: n_grid holds a repeated value");
  }
  if (K < 1) throw ParameterError("study: K must be at least 1");
  if (B < 1) throw ParameterError("study: B must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("study: delta must lie in (0,1)");
  if (burn_in < 0) throw ParameterError("study: burn_in must be non-negative");
  optimizer.validate();
  if (targets.empty()) throw ParameterError("study: no targets");
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j]) throw ParameterError("study: repeated target");
  const PredictiveTarget pred{predictive_set, x_n.value_or(0)};
  for (const auto& t : targets) {
    if (t.kind == Target::Kind::Predictive) pred.validate();
    if (t.kind == Target::Kind::G && t.k < 0) throw ParameterError("study: negative G index");
    // Probes definability under the DGP.
    (void)true_functional(dgp, t, pred);
  }
}

double true_functional(const Dgp& dgp, const Target& target, const PredictiveTarget& predictive) {
  using Kind = Target::Kind;
  if (const auto* d = std::get_if<InarchDgp>(&dgp)) {
    switch (target.kind) {
      case Kind::Alpha:
        return d->alpha;
      case Kind::IdObservations:
        return 1.0 / (1.0 - d->alpha * d->alpha);
      case Kind::Predictive: {
        predictive.validate();
        const double mean = d->beta + d->alpha * predictive.x_n;
        CompensatedSum acc;
        for (Count s : predictive.set) acc.add(poisson_pmf(s, mean));
        return acc.value();
      }
      default:
        throw ParameterError("target '" + target.name() + "' is undefined for an INARCH process");
    }
  }
  const InarModel model = dgp_model(dgp);
  switch (target.kind) {
    case Kind::Alpha:
      return model.alphas[0];
    case Kind::G:
      if (const auto* p = std::get_if<PoiInarDgp>(&dgp)) return poisson_pmf(target.k, p->lambda);
      if (const auto* nb = std::get_if<NbInarDgp>(&dgp))
        return negbin_pmf(target.k, nb->size, nb->prob);
      return model.innovations(target.k);
    case Kind::IdInnovations:
    case Kind::IdObservations: {
      double id_innov = 0.0;
      if (std::holds_alternative<PoiInarDgp>(dgp)) {
        id_innov = 1.0;
      } else if (const auto* nb = std::get_if<NbInarDgp>(&dgp)) {
        id_innov = 1.0 / nb->prob;
      } else {
        id_innov = dispersion_innovations(model.innovations);
      }
      return target.kind == Kind::IdInnovations
                 ? id_innov
                 : dispersion_observations(id_innov, model.alphas[0]);
    }
    case Kind::Predictive:
      return predictive_probability(model, predictive);
  }
  throw ParameterError("unknown target");
}

double model_functional(const InarModel& model, const Target& target,
                        const PredictiveTarget& predictive) {
  switch (target.kind) {
    case Target::Kind::Alpha:
      return model.alphas.at(0);
    case Target::Kind::G:
      return model.innovations(target.k);
    case Target::Kind::Predictive:
      return predictive_probability(model, predictive);
    case Target::Kind::IdInnovations:
      return dispersion_indices(model).id_innovations;
    case Target::Kind::IdObservations:
      return dispersion_indices(model).id_observations;
  }
  throw ParameterError("unknown target");
}

CountSeries simulate_dgp(const Dgp& dgp, int n, int burn_in, RandomStream& rng) {
  if (const auto* d = std::get_if<InarchDgp>(&dgp))
    return simulate_inarch(d->alpha, d->beta, n, burn_in, rng);
  return simulate_inar(dgp_model(dgp), n, burn_in, rng);
}

StudyResult run_study(const StudyConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const std::size_t n_count = cfg.n_grid.size();
  const auto K = static_cast<std::size_t>(cfg.K);
  const std::size_t T = cfg.targets.size();
  const std::size_t total = n_count * K;

  std::vector<std::size_t> order = options.order;
  if (order.empty()) {
    order.resize(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
  } else {
    if (order.size() != total) throw ParameterError("study: order is not a permutation");
    std::vector<bool> hit(total, false);
    for (std::size_t i : order) {
      if (i >= total || hit[i]) throw ParameterError("study: order is not a permutation");
      hit[i] = true;
    }
  }

  // outcomes[task * T + target]; every task writes only its own slots.
  std::vector<TargetOutcome> outcomes(total * T);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  const BootstrapOptions boot_options{cfg.burn_in, 0.10, Execution::serial()};

  parallel_for(total, options.exec, [&](std::size_t slot) {
    const std::size_t task = order[slot];
    const std::size_t ni = task / K;
    const std::size_t k = task % K;
    const int n = cfg.n_grid[ni];
    const SeedSpec rep = cfg.seed.child(static_cast<std::uint64_t>(n)).child(k);
    TargetOutcome* out = &outcomes[task * T];

    try {
      RandomStream data_rng(rep.child(0));
      const CountSeries series = simulate_dgp(cfg.dgp, n, cfg.burn_in, data_rng);
      OptimizerConfig opt = cfg.optimizer;
      opt.seed = rep.child(2);
      opt.record_trace = false;

      BootstrapDraws draws;
      if (cfg.method == Method::SemiParametric) {
        const FitResult fit = npmle_fit(series, 1, opt);
        draws = sp_inar_bootstrap(series, fit, cfg.B, opt, rep.child(1), boot_options);
      } else {
        const FitResult fit = poisson_ml_fit(series, opt);
        draws = parametric_poi_bootstrap(series, fit, cfg.B, opt, rep.child(1), boot_options);
      }
      const PredictiveTarget pred{cfg.predictive_set, cfg.x_n.value_or(series.body().back())};

      for (std::size_t ti = 0; ti < T; ++ti) {
        const Target& target = cfg.targets[ti];
        try {
          const FunctionalEstimate est = functional_interval(
              draws, target.name(),
              [&](const InarModel& m) { return model_functional(m, target, pred); }, cfg.delta);
          const double truth = true_functional(cfg.dgp, target, pred);
          out[ti].covered = est.ci.lower <= truth && truth <= est.ci.upper;
          out[ti].length = est.ci.upper - est.ci.lower;
          out[ti].ok = true;
        } catch (const std::runtime_error&) {
        } catch (const std::domain_error&) {
        }
      }
    } catch (const std::runtime_error&) {
    } catch (const std::domain_error&) {
    }

    const std::size_t finished = ++done;
    if (options.progress) {
      std::lock_guard lock(progress_mutex);
      options.progress(finished, total);
    }
  });

  StudyResult result;
  for (std::size_t ni = 0; ni < n_count; ++ni) {
    for (std::size_t ti = 0; ti < T; ++ti) {
      int effective = 0;
      int covered = 0;
      CompensatedSum length;
      for (std::size_t k = 0; k < K; ++k) {
        const TargetOutcome& o = outcomes[(ni * K + k) * T + ti];
        if (!o.ok) continue;
        ++effective;
        covered += o.covered ? 1 : 0;
        length.add(o.length);
      }
      StudyCell cell;
      cell.target = cfg.targets[ti].name();
      cell.n = cfg.n_grid[ni];
      cell.k_effective = effective;
      cell.failures = cfg.K - effective;
      if (effective > 0) {
        cell.coverage = static_cast<double>(covered) / effective;
        cell.avg_length = length.value() / effective;
        cell.mc_se = std::sqrt(cell.coverage * (1.0 - cell.coverage) / effective);
      } else {
        cell.coverage = cell.avg_length = cell.mc_se = kNaN;
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::string emit_table(const StudyResult& result, TableFormat format) {
  std::ostringstream os;
  switch (format) {
    case TableFormat::Csv: {
      os << "target,n,coverage,avg_length,mc_se,failures,k_effective\n";
      for (const auto& c : result.cells)
        os << c.target << ',' << c.n << ',' << fixed3(c.coverage) << ',' << fixed3(c.avg_length)
           << ',' << fixed3(c.mc_se) << ',' << c.failures << ',' << c.k_effective << '\n';
      break;
    }
    case TableFormat::Markdown: {
      std::vector<std::string> targets;
      std::vector<int> ns;
      for (const auto& c : result.cells) {
        if (std::find(targets.begin(), targets.end(), c.target) == targets.end())
          targets.push_back(c.target);
        if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
      }
      os << "| target |";
      for (int n : ns) os << " n=" << n << " |";
      os << "\n|---|";
      for (std::size_t i = 0; i < ns.size(); ++i) os << "---|";
      os << '\n';
      for (const auto& t : targets) {
        os << "| " << t << " |";
        for (int n : ns) {
          std::string text = "-";
          for (const auto& c : result.cells)
            if (c.target == t && c.n == n) text = fixed3(c.coverage) + "/" + fixed3(c.avg_length);
          os << ' ' << text << " |";
        }
        os << '\n';
      }
      break;
    }
    case TableFormat::Json: {
      auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
      nlohmann::json cells = nlohmann::json::array();
      for (const auto& c : result.cells)
        cells.push_back({{"target", c.target},
                         {"n", c.n},
                         {"coverage", num(c.coverage)},
                         {"avg_length", num(c.avg_length)},
                         {"mc_se", num(c.mc_se)},
                         {"failures", c.failures},
                         {"k_effective", c.k_effective}});
      nlohmann::json doc = {{"schema_version", 1}, {"cells", std::move(cells)}};
      os << doc.dump(2) << '\n';
      break;
    }
  }
  return os.str();
}

StudyResult study_result_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("schema_version").get<int>() != 1)
      throw InputError("study result: unsupported schema_version");
    auto num = [](const nlohmann::json& v) { return v.is_null() ? kNaN : v.get<double>(); };
    StudyResult result;
    for (const auto& c : doc.at("cells")) {
      StudyCell cell;
      cell.target = c.at("target").get<std::string>();
      cell.n = c.at("n").get<int>();
      cell.coverage = num(c.at("coverage"));
      cell.avg_length = num(c.at("avg_length"));
      cell.mc_se = num(c.at("mc_se"));
      cell.failures = c.at("failures").get<int>();
      cell.k_effective = c.at("k_effective").get<int>();
      result.cells.push_back(std::move(cell));
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("study result: ") + e.what());
  }
}

}  // namespace inar
