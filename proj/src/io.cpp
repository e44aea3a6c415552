#include "inar/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

namespace inar {
namespace {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Typed field access that reports the JSON pointer of a bad value.
class Reader {
 public:
  Reader(const json& node, std::string pointer) : node_(node), pointer_(std::move(pointer)) {
    if (!node_.is_object()) throw ConfigError(pointer_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : node_.items())
      if (!allowed.count(item.key())) throw ConfigError(at(item.key()), "unknown field");
  }

  [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }
  [[nodiscard]] std::string at(const std::string& key) const { return pointer_ + "/" + key; }
  [[nodiscard]] const json& raw(const std::string& key) const {
    if (!has(key)) throw ConfigError(at(key), "missing field");
    return node_.at(key);
  }

  [[nodiscard]] double number(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    return v.get<double>();
  }
  [[nodiscard]] double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  [[nodiscard]] long long integer(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<long long>();
  }
  [[nodiscard]] long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  [[nodiscard]] std::string string(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& node_;
  std::string pointer_;
};

int bounded_int(const Reader& r, const std::string& key, long long lo, long long hi,
                long long fallback) {
  const long long v = r.integer(key, fallback);
  if (v < lo || v > hi)
    throw ConfigError(r.at(key), "value out of range [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::vector<long long> integer_list(const Reader& r, const std::string& key) {
  const json& v = r.raw(key);
  if (!v.is_array()) throw ConfigError(r.at(key), "expected an array");
  std::vector<long long> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer())
      throw ConfigError(r.at(key) + "/" + std::to_string(i), "expected an integer");
    out.push_back(v[i].get<long long>());
  }
  return out;
}

Dgp parse_dgp(const json& node, const std::string& ptr) {
  const Reader r(node, ptr);
  const std::string type = r.string("type");
  auto unit = [&](const std::string& key, double value) {
    if (!(value > 0.0 && value < 1.0)) throw ConfigError(r.at(key), "must lie in (0,1)");
    return value;
  };
  if (type == "poi_inar") {
    r.allow({"type", "lambda", "alpha"});
    const double lambda = r.number("lambda");
    if (!(lambda > 0.0)) throw ConfigError(r.at("lambda"), "must be positive");
    return PoiInarDgp{lambda, unit("alpha", r.number("alpha"))};
  }
  if (type == "nb_inar") {
    r.allow({"type", "size", "prob", "alpha"});
    return NbInarDgp{bounded_int(r, "size", 1, 1'000'000, 0), unit("prob", r.number("prob")),
                     unit("alpha", r.number("alpha"))};
  }
  if (type == "inarch") {
    r.allow({"type", "alpha", "beta"});
    const double alpha = r.number("alpha");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError(r.at("alpha"), "must lie in [0,1)");
    const double beta = r.number("beta");
    if (!(beta > 0.0)) throw ConfigError(r.at("beta"), "must be positive");
    return InarchDgp{alpha, beta};
  }
  if (type == "explicit_inar") {
    r.allow({"type", "probs", "alpha"});
    const json& probs = r.raw("probs");
    if (!probs.is_array() || probs.empty()) throw ConfigError(r.at("probs"), "expected a non-empty array");
    std::vector<double> values;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!probs[i].is_number() || probs[i].get<double>() < 0.0)
        throw ConfigError(r.at("probs") + "/" + std::to_string(i), "expected a non-negative number");
      values.push_back(probs[i].get<double>());
    }
    try {
      (void)Pmf(values);
    } catch (const std::exception& e) {
      throw ConfigError(r.at("probs"), e.what());
    }
    return ExplicitInarDgp{std::move(values), unit("alpha", r.number("alpha"))};
  }
  throw ConfigError(r.at("type"), "unknown dgp type '" + type + "'");
}

}  // namespace

std::vector<Count> read_counts_csv(std::istream& in) {
  std::vector<Count> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim(line);
    if (cell.empty()) continue;
    if (out.empty() && line_no == 1 && cell == "count") continue;
    const auto at_line = [&](const std::string& what) {
      return InputError("line " + std::to_string(line_no) + ": " + what + " '" + cell + "'");
    };
    if (cell.find_first_not_of("0123456789") != std::string::npos) {
      if (cell[0] == '-' && cell.size() > 1 &&
          cell.find_first_not_of("0123456789", 1) == std::string::npos)
        throw at_line("negative count");
      throw at_line("not a non-negative integer");
    }
    if (cell.size() > 9) throw at_line("count too large");
    out.push_back(static_cast<Count>(std::stol(cell)));
  }
  if (in.bad()) throw InputError("read error");
  if (out.empty()) throw InputError("no counts in input");
  return out;
}

std::vector<Count> read_counts_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_counts_csv(in);
}

void write_counts_csv(std::ostream& out, const CountSeries& series) {
  out << "count\n";
  for (Count v : series.values()) out << v << '\n';
}

json to_json(const FitResult& fit) {
  json doc = {{"schema_version", 1},
              {"p", fit.model.order()},
              {"alphas", fit.model.alphas},
              {"pmf", std::vector<double>(fit.model.innovations.probs().begin(),
                                          fit.model.innovations.probs().end())},
              {"u_minus", fit.bounds.u_minus},
              {"u_plus", fit.bounds.u_plus},
              {"loglik", finite_or_null(fit.loglik)},
              {"converged", fit.converged},
              {"degenerate", fit.degenerate},
              {"iterations", fit.iterations},
              {"grad_norm", finite_or_null(fit.grad_norm)},
              {"warnings", fit.warnings}};
  if (fit.lambda) doc["lambda"] = *fit.lambda;
  return doc;
}

json to_json(const BootstrapDraws& draws) {
  json list = json::array();
  for (const auto& d : draws.draws) {
    json item = {{"alphas", d.alphas},
                 {"pmf", d.pmf},
                 {"flags",
                  {{"degenerate", d.flags.degenerate},
                   {"not_converged", d.flags.not_converged},
                   {"failed", d.flags.failed}}},
                 {"seed_path", d.seed.path()}};
    if (d.lambda) item["lambda"] = *d.lambda;
    list.push_back(std::move(item));
  }
  return {{"schema_version", 1},
          {"B", draws.b_count},
          {"origin", to_json(draws.origin)},
          {"draws", std::move(list)},
          {"excluded_count", draws.excluded_count}};
}

json to_json(const FunctionalEstimate& estimate) {
  return {{"schema_version", 1},
          {"target", estimate.target},
          {"point", finite_or_null(estimate.point)},
          {"ci",
           {{"lower", finite_or_null(estimate.ci.lower)},
            {"upper", finite_or_null(estimate.ci.upper)},
            {"level", estimate.ci.level}}},
          {"B_effective", estimate.b_effective}};
}

StudyConfig study_config_from_json(const json& doc) {
  const Reader r(doc, "");
  r.allow({"dgp", "n_grid", "K", "B", "delta", "method", "targets", "seed", "burn_in",
           "predictive", "optimizer"});
  StudyConfig cfg;
  cfg.dgp = parse_dgp(r.raw("dgp"), r.at("dgp"));

  cfg.n_grid.clear();
  const auto grid = integer_list(r, "n_grid");
  if (grid.empty()) throw ConfigError(r.at("n_grid"), "must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2 || grid[i] > 10'000'000)
      throw ConfigError(r.at("n_grid") + "/" + std::to_string(i), "n must lie in [2, 1e7]");
    if (std::find(cfg.n_grid.begin(), cfg.n_grid.end(), grid[i]) != cfg.n_grid.end())
      throw ConfigError(r.at("n_grid") + "/" + std::to_string(i), "repeated n");
    cfg.n_grid.push_back(static_cast<int>(grid[i]));
  }
  cfg.K = bounded_int(r, "K", 1, 10'000'000, 0);
  cfg.B = bounded_int(r, "B", 1, 10'000'000, 0);
  cfg.delta = r.number("delta", cfg.delta);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError(r.at("delta"), "must lie in (0,1)");
  cfg.burn_in = bounded_int(r, "burn_in", 0, 10'000'000, cfg.burn_in);

  if (r.has("method")) {
    const std::string method = r.string("method");
    if (method == "semi_parametric" || method == "sp") {
      cfg.method = Method::SemiParametric;
    } else if (method == "parametric_poisson" || method == "poi") {
      cfg.method = Method::ParametricPoisson;
    } else {
      throw ConfigError(r.at("method"), "unknown method '" + method + "'");
    }
  }

  if (r.has("seed")) {
    const json& s = r.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError(r.at("seed"), "expected a non-negative integer");
    cfg.seed = SeedSpec(s.get<std::uint64_t>());
  }

  const json& targets = r.raw("targets");
  if (!targets.is_array() || targets.empty())
    throw ConfigError(r.at("targets"), "expected a non-empty array");
  cfg.targets.clear();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string ptr = r.at("targets") + "/" + std::to_string(i);
    if (!targets[i].is_string()) throw ConfigError(ptr, "expected a string");
    try {
      cfg.targets.push_back(Target::parse(targets[i].get<std::string>()));
    } catch (const ParameterError& e) {
      throw ConfigError(ptr, e.what());
    }
    if (std::find(cfg.targets.begin(), cfg.targets.end() - 1, cfg.targets.back()) !=
        cfg.targets.end() - 1)
      throw ConfigError(ptr, "repeated target");
  }

  if (r.has("predictive")) {
    const Reader pr(r.raw("predictive"), r.at("predictive"));
    pr.allow({"set", "x_n"});
    if (pr.has("set")) {
      cfg.predictive_set.clear();
      for (long long s : integer_list(pr, "set")) {
        if (s < 0 || s > std::numeric_limits<Count>::max())
          throw ConfigError(pr.at("set"), "values must be non-negative counts");
        cfg.predictive_set.push_back(static_cast<Count>(s));
      }
      try {
        PredictiveTarget{cfg.predictive_set, 0}.validate();
      } catch (const ParameterError& e) {
        throw ConfigError(pr.at("set"), e.what());
      }
    }
    if (pr.has("x_n")) {
      const json& xn = pr.raw("x_n");
      if (xn.is_string() && xn.get<std::string>() == "last") {
        cfg.x_n.reset();
      } else {
        cfg.x_n = bounded_int(pr, "x_n", 0, std::numeric_limits<Count>::max(), 0);
      }
    }
  }

  if (r.has("optimizer")) {
    const Reader orr(r.raw("optimizer"), r.at("optimizer"));
    orr.allow({"max_iter", "tol", "restarts", "alpha_clip"});
    cfg.optimizer.max_iter = bounded_int(orr, "max_iter", 1, 100'000'000, cfg.optimizer.max_iter);
    cfg.optimizer.restarts = bounded_int(orr, "restarts", 1, 1000, cfg.optimizer.restarts);
    cfg.optimizer.tol = orr.number("tol", cfg.optimizer.tol);
    if (!(cfg.optimizer.tol > 0.0)) throw ConfigError(orr.at("tol"), "must be positive");
    cfg.optimizer.alpha_clip = orr.number("alpha_clip", cfg.optimizer.alpha_clip);
    try {
      cfg.optimizer.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(orr.at("alpha_clip"), e.what());
    }
  }

  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(r.at("targets"), e.what());
  }
  return cfg;
}

}  // namespace inar
