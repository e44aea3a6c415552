// Command-line front end: simulate / fit / bootstrap-ci / predict / dispersion / study.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "inar/applications.hpp"
#include "inar/errors.hpp"
#include "inar/io.hpp"
#include "inar/study.hpp"

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kFlagged = 2, kInternal = 3 };

struct Common {
  std::uint64_t seed = inar::kDefaultSeed;
  int threads = 0;
  std::string out;
};

struct FitOptions {
  std::string input;
  int p = 1;
  std::string method = "sp";
  int restarts = 3;
  int max_iter = 5000;
  double tol = 1e-8;
};

void emit(const Common& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(common.out);
  if (!file) throw inar::InputError("cannot write '" + common.out + "'");
  file << text;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

inar::OptimizerConfig optimizer(const FitOptions& f, const Common& common) {
  inar::OptimizerConfig cfg;
  cfg.restarts = f.restarts;
  cfg.max_iter = f.max_iter;
  cfg.tol = f.tol;
  cfg.seed = inar::SeedSpec(common.seed).child(0);
  return cfg;
}

inar::CountSeries load(const FitOptions& f) {
  const auto values = inar::read_counts_csv_file(f.input);
  if (static_cast<int>(values.size()) < f.p + 1)
    throw inar::InputError("series needs at least p + 1 values");
  return inar::CountSeries::from_values(values, f.p);
}

inar::FitResult fit_series(const inar::CountSeries& series, const FitOptions& f,
                           const Common& common) {
  if (f.method == "poi") {
    if (f.p != 1) throw inar::InputError("--method poi requires --p 1");
    return inar::poisson_ml_fit(series, optimizer(f, common));
  }
  return inar::npmle_fit(series, f.p, optimizer(f, common));
}

inar::BootstrapDraws bootstrap(const inar::CountSeries& series, const inar::FitResult& fit,
                               const FitOptions& f, const Common& common, int B) {
  inar::BootstrapOptions options;
  options.exec.threads = common.threads;
  const inar::SeedSpec seed = inar::SeedSpec(common.seed).child(1);
  if (f.method == "poi")
    return inar::parametric_poi_bootstrap(series, fit, B, optimizer(f, common), seed, options);
  return inar::sp_inar_bootstrap(series, fit, B, optimizer(f, common), seed, options);
}

std::vector<inar::Count> parse_set(const std::string& text) {
  std::vector<inar::Count> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789 ") != std::string::npos)
      throw inar::InputError("--S expects comma-separated non-negative integers");
    out.push_back(static_cast<inar::Count>(std::stol(item)));
  }
  return out;
}

void add_fit_options(CLI::App* cmd, FitOptions& f, bool method) {
  cmd->add_option("input", f.input, "CSV file, one count per line")->required()->check(CLI::ExistingFile);
  cmd->add_option("--p", f.p, "Autoregressive order")->check(CLI::Range(1, 16));
  if (method)
    cmd->add_option("--method", f.method, "sp (semi-parametric NPMLE) or poi (Poisson ML)")
        ->check(CLI::IsMember({"sp", "poi"}));
  cmd->add_option("--restarts", f.restarts, "Optimizer restarts")->check(CLI::Range(1, 1000));
  cmd->add_option("--max-iter", f.max_iter, "Optimizer iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "Relative log-likelihood tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"INAR(p) semi-parametric estimation and bootstrap inference"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Master seed (default 0xC0C0A75EED00)");
  app.add_option("--threads", common.threads, "Worker threads, 0 = all available")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", common.out, "Write the result to this path instead of stdout");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a count series as CSV");
  std::string dgp = "poi_inar";
  std::vector<double> alphas{0.5};
  double lambda = 1.0, prob = 2.0 / 3.0, beta = 1.0;
  int size = 2, n = 100, burn_in = inar::kDefaultBurnIn;
  sim->add_option("--dgp", dgp, "poi_inar, nb_inar or inarch")
      ->check(CLI::IsMember({"poi_inar", "nb_inar", "inarch"}));
  sim->add_option("--alpha", alphas, "Thinning coefficient(s), comma separated")->delimiter(',');
  sim->add_option("--lambda", lambda, "Poisson innovation mean");
  sim->add_option("--size", size, "Negative binomial size");
  sim->add_option("--prob", prob, "Negative binomial success probability");
  sim->add_option("--beta", beta, "INARCH intercept");
  sim->add_option("-n,--n", n, "Number of transitions (the body holds n + 1 values)")
      ->check(CLI::Range(1, 100'000'000));
  sim->add_option("--burn-in", burn_in, "Discarded warm-up length")->check(CLI::NonNegativeNumber);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model; prints FitResult JSON");
  FitOptions fit_opts;
  add_fit_options(fit_cmd, fit_opts, true);

  // bootstrap-ci
  auto* boot_cmd = app.add_subcommand("bootstrap-ci", "Bootstrap Hall intervals for parameters");
  FitOptions boot_opts;
  int B = 500;
  double delta = 0.05;
  std::vector<std::string> targets{"alpha", "G0", "G1", "G2", "G3", "G4"};
  std::string draws_out;
  add_fit_options(boot_cmd, boot_opts, true);
  boot_cmd->add_option("--B", B, "Bootstrap draws")->check(CLI::Range(1, 10'000'000));
  boot_cmd->add_option("--delta", delta, "Interval level is 1 - delta")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  boot_cmd->add_option("--targets", targets, "alpha, G0.., id_innov, id_obs")->delimiter(',');
  boot_cmd->add_option("--draws-out", draws_out, "Also write all draws as JSON");

  // predict
  auto* pred_cmd = app.add_subcommand("predict", "Interval for P(X_{n+1} in S | X_n = x_n)");
  FitOptions pred_opts;
  std::string set_text = "0", xn_text = "auto";
  add_fit_options(pred_cmd, pred_opts, false);
  pred_cmd->add_option("--S", set_text, "Comma-separated set of counts");
  pred_cmd->add_option("--xn", xn_text, "Conditioning value or 'auto' for the last observation");
  pred_cmd->add_option("--B", B, "Bootstrap draws")->check(CLI::Range(1, 10'000'000));
  pred_cmd->add_option("--delta", delta, "Interval level is 1 - delta")->check(CLI::Range(1e-9, 1.0 - 1e-9));

  // dispersion
  auto* disp_cmd = app.add_subcommand("dispersion", "Intervals for both dispersion indices");
  FitOptions disp_opts;
  add_fit_options(disp_cmd, disp_opts, false);
  disp_cmd->add_option("--B", B, "Bootstrap draws")->check(CLI::Range(1, 10'000'000));
  disp_cmd->add_option("--delta", delta, "Interval level is 1 - delta")->check(CLI::Range(1e-9, 1.0 - 1e-9));

  // study
  auto* study_cmd = app.add_subcommand("study", "Monte Carlo coverage study from a JSON config");
  std::string config_path, format = "markdown";
  bool quiet = false;
  study_cmd->add_option("--config", config_path, "Study configuration JSON")->required();
  study_cmd->add_option("--format", format, "markdown, csv or json")
      ->check(CLI::IsMember({"markdown", "csv", "json"}));
  study_cmd->add_flag("--quiet", quiet, "No progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (sim->parsed()) {
      inar::RandomStream rng(inar::SeedSpec(common.seed));
      inar::CountSeries series;
      if (dgp == "inarch") {
        series = inar::simulate_inarch(alphas.at(0), beta, n, burn_in, rng);
      } else {
        const inar::PmfFamily family = dgp == "poi_inar"
                                           ? inar::PmfFamily{inar::PoissonFamily{lambda}}
                                           : inar::PmfFamily{inar::NegBinFamily{size, prob}};
        const inar::InarModel model{alphas, inar::make_pmf(family)};
        model.validate(inar::Validation::Strict);
        series = inar::simulate_inar(model, n, burn_in, rng);
      }
      std::ostringstream os;
      inar::write_counts_csv(os, series);
      emit(common, os.str());
      return kOk;
    }

    if (fit_cmd->parsed()) {
      const auto series = load(fit_opts);
      const auto fit = fit_series(series, fit_opts, common);
      emit(common, dump(inar::to_json(fit)));
      return fit.clean() ? kOk : kFlagged;
    }

    if (boot_cmd->parsed()) {
      const auto series = load(boot_opts);
      const auto fit = fit_series(series, boot_opts, common);
      const auto draws = bootstrap(series, fit, boot_opts, common, B);
      nlohmann::json intervals = nlohmann::json::array();
      const inar::PredictiveTarget unused{{0}, 0};
      for (const auto& name : targets) {
        const inar::Target target = inar::Target::parse(name);
        if (target.kind == inar::Target::Kind::Predictive)
          throw inar::InputError("use the predict command for predictive targets");
        intervals.push_back(inar::to_json(inar::functional_interval(
            draws, name,
            [&](const inar::InarModel& m) { return inar::model_functional(m, target, unused); },
            delta)));
      }
      if (!draws_out.empty()) {
        std::ofstream file(draws_out);
        if (!file) throw inar::InputError("cannot write '" + draws_out + "'");
        file << dump(inar::to_json(draws));
      }
      emit(common, dump({{"schema_version", 1},
                         {"fit", inar::to_json(fit)},
                         {"B", draws.b_count},
                         {"excluded_count", draws.excluded_count},
                         {"intervals", intervals}}));
      return fit.clean() ? kOk : kFlagged;
    }

    if (pred_cmd->parsed()) {
      if (pred_opts.p != 1) throw inar::InputError("predict requires --p 1");
      const auto series = load(pred_opts);
      inar::PredictiveTarget target{parse_set(set_text), series.body().back()};
      if (xn_text != "auto") {
        if (xn_text.empty() || xn_text.find_first_not_of("0123456789") != std::string::npos)
          throw inar::InputError("--xn expects a non-negative integer or 'auto'");
        target.x_n = static_cast<inar::Count>(std::stol(xn_text));
      }
      target.validate();
      const auto fit = fit_series(series, pred_opts, common);
      const auto draws = bootstrap(series, fit, pred_opts, common, B);
      emit(common, dump(inar::to_json(inar::predictive_interval(draws, target, delta))));
      return fit.clean() ? kOk : kFlagged;
    }

    if (disp_cmd->parsed()) {
      if (disp_opts.p != 1) throw inar::InputError("dispersion requires --p 1");
      const auto series = load(disp_opts);
      const auto fit = fit_series(series, disp_opts, common);
      const auto draws = bootstrap(series, fit, disp_opts, common, B);
      const auto est = inar::dispersion_intervals(draws, delta);
      emit(common, dump({{"schema_version", 1},
                         {"innovations", inar::to_json(est.innovations)},
                         {"observations", inar::to_json(est.observations)}}));
      return fit.clean() ? kOk : kFlagged;
    }

    if (study_cmd->parsed()) {
      std::ifstream file(config_path);
      if (!file) throw inar::InputError("cannot open '" + config_path + "'");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(file);
      } catch (const nlohmann::json::parse_error& e) {
        throw inar::ConfigError("", std::string("malformed JSON: ") + e.what());
      }
      const auto cfg = inar::study_config_from_json(doc);
      inar::RunOptions options;
      options.exec.threads = common.threads;
      if (!quiet)
        options.progress = [](std::size_t done, std::size_t total) {
          if (done == total || done % 10 == 0)
            std::cerr << "\rreplicates " << done << "/" << total << (done == total ? "\n" : "")
                      << std::flush;
        };
      const auto result = inar::run_study(cfg, options);
      const auto fmt = format == "json" ? inar::TableFormat::Json
                       : format == "csv" ? inar::TableFormat::Csv
                                         : inar::TableFormat::Markdown;
      emit(common, inar::emit_table(result, fmt));
      for (const auto& cell : result.cells)
        if (cell.failures > 0) return kFlagged;
      return kOk;
    }
  } catch (const inar::BootstrapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::invalid_argument& e) {
    // InputError, ConfigError and ParameterError.
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
