#pragma once

// Grouped-transition likelihood machinery shared by the estimators. Not part
// of the installed interface.

#include <span>
#include <vector>

#include "inar/kernel.hpp"
#include "inar/model.hpp"

namespace inar::detail {

/// Distinct (past, current) transitions of a series with multiplicities.
struct TransitionTable {
  struct Cell {
    std::size_t past = 0;
    Count current = 0;
    double weight = 0.0;
  };

  int p = 0;
  std::vector<std::vector<Count>> pasts;
  std::vector<Cell> cells;
  double total_weight = 0.0;

  static TransitionTable build(const CountSeries& series, int p);
};

/// Conditional log-likelihood of (alpha, g) with g dense on 0..u_+ and zero
/// below u_-. set_alpha() caches the thinned laws and their alpha-derivatives.
class NpmleObjective {
 public:
  NpmleObjective(const TransitionTable& table, SupportBounds bounds);

  void set_alpha(std::span<const double> alphas);
  [[nodiscard]] std::span<const double> alphas() const { return alphas_; }

  [[nodiscard]] double loglik(std::span<const double> g) const;

  /// Log-likelihood plus its (unscaled) gradient in alpha.
  double gradient(std::span<const double> g, std::span<double> grad) const;

  /// One EM update of g at the cached alpha. Returns the log-likelihood at
  /// the input g.
  double em_step(std::span<const double> g, std::span<double> out) const;

  /// Directional derivative D(e) = (1/W) sum_c w_c T_c(x_c - e) / P_c of the
  /// mean log-likelihood towards a point mass at e, for e in [u_-, u_+].
  /// At a maximizer in G, D(e) <= 1 everywhere with equality where g(e) > 0.
  void directional(std::span<const double> g, std::span<double> out) const;

  /// Vertex-direction step: g <- (1-t) g + t delta_vertex with t in [0,1)
  /// maximizing the (concave) log-likelihood along that segment. Returns the
  /// log-likelihood at the updated g.
  double vertex_step(std::span<double> g, Count vertex) const;

 private:
  [[nodiscard]] double cell_probability(std::size_t c, std::span<const double> g) const;

  const TransitionTable& table_;
  SupportBounds bounds_;
  std::vector<double> alphas_;
  std::vector<std::vector<double>> thinned_;
  // derivative_[past][i] = d thinned_[past] / d alpha_i
  std::vector<std::vector<std::vector<double>>> derivative_;
};

/// Conditional log-likelihood of the Poisson INAR(1) model in (alpha, lambda).
class PoissonObjective {
 public:
  PoissonObjective(const TransitionTable& table, Count u_plus);

  /// Log-likelihood; fills grad = (d/d alpha, d/d lambda) when non-empty.
  double evaluate(double alpha, double lambda, std::span<double> grad) const;

 private:
  const TransitionTable& table_;
  Count u_plus_;
  Count max_past_ = 0;
};

}  // namespace inar::detail
