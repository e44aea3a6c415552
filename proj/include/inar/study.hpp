#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "inar/applications.hpp"

namespace inar {

/// Poisson(lambda) innovations.
struct PoiInarDgp {
  double lambda = 1.0;
  double alpha = 0.5;
};
/// NegBin(size, prob) innovations.
struct NbInarDgp {
  int size = 2;
  double prob = 2.0 / 3.0;
  double alpha = 0.5;
};
/// X_t | past ~ Poisson(beta + alpha X_{t-1}); not an INAR process.
struct InarchDgp {
  double alpha = 0.5;
  double beta = 1.0;
};
/// Innovations given as an explicit pmf (used for degenerate smoke runs).
struct ExplicitInarDgp {
  std::vector<double> probs{1.0};
  double alpha = 0.5;
};

using Dgp = std::variant<PoiInarDgp, NbInarDgp, InarchDgp, ExplicitInarDgp>;

enum class Method { SemiParametric, ParametricPoisson };

/// Functional of (alpha, G) a study builds intervals for.
struct Target {
  enum class Kind { Alpha, G, Predictive, IdInnovations, IdObservations };
  Kind kind = Kind::Alpha;
  /// Innovation index for Kind::G.
  int k = 0;

  /// "alpha", "G0".."G9", "predictive", "id_innov", "id_obs".
  [[nodiscard]] std::string name() const;
  static Target parse(const std::string& name);
  friend bool operator==(const Target&, const Target&) = default;
};

struct StudyConfig {
  Dgp dgp = PoiInarDgp{};
  std::vector<int> n_grid{100};
  int K = 100;
  int B = 100;
  double delta = 0.05;
  Method method = Method::SemiParametric;
  std::vector<Target> targets{Target{}};
  SeedSpec seed{kDefaultSeed};
  int burn_in = kDefaultBurnIn;
  OptimizerConfig optimizer;
  /// S for the predictive target.
  std::vector<Count> predictive_set{0};
  /// Conditioning value; empty means the last observation of each replicate.
  std::optional<Count> x_n;

  /// Throws ParameterError for invalid sizes, DGP parameters, or targets that
  /// have no true value under the DGP.
  void validate() const;
};

struct StudyCell {
  std::string target;
  int n = 0;
  double coverage = 0.0;
  double avg_length = 0.0;
  double mc_se = 0.0;
  int failures = 0;
  int k_effective = 0;

  friend bool operator==(const StudyCell&, const StudyCell&) = default;
};

struct StudyResult {
  /// Ordered by n (grid order), then by target (config order).
  std::vector<StudyCell> cells;

  friend bool operator==(const StudyResult&, const StudyResult&) = default;
};

struct RunOptions {
  Execution exec;
  /// Execution order of the flattened (n, replicate) tasks; empty means
  /// natural order. Must be a permutation when given.
  std::vector<std::size_t> order;
  /// Called after each finished task with (done, total); serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Replicate k at sample size n draws everything from seed.child(n).child(k):
/// child(0) simulates the data, child(1) drives the bootstrap and child(2)
/// the optimizer restarts. The seeds do not depend on the method, so two
/// studies differing only in method see identical data.
StudyResult run_study(const StudyConfig& cfg, const RunOptions& options = {});

/// Ground truth of target under dgp. The predictive target uses the exact
/// transition law of the DGP (Poisson(beta + alpha x_n) for INARCH).
/// Throws ParameterError when target is undefined for dgp.
double true_functional(const Dgp& dgp, const Target& target,
                       const PredictiveTarget& predictive = PredictiveTarget{{0}, 0});

/// Estimate of target under a fitted model.
double model_functional(const InarModel& model, const Target& target,
                        const PredictiveTarget& predictive);

CountSeries simulate_dgp(const Dgp& dgp, int n, int burn_in, RandomStream& rng);

enum class TableFormat { Csv, Markdown, Json };

/// Markdown: targets as rows, n as columns, cells "coverage/length" with three
/// decimals. CSV: one line per cell, three decimals. JSON: full precision.
std::string emit_table(const StudyResult& result, TableFormat format);

/// Inverse of emit_table(..., Json). Throws InputError on malformed input.
StudyResult study_result_from_json(const std::string& text);

}  // namespace inar
