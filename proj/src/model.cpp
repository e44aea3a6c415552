#include "inar/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "inar/errors.hpp"

namespace inar {

void InarModel::validate(Validation mode) const {
  if (alphas.empty()) throw ParameterError("model: order p must be positive");
  double total = 0.0;
  for (double a : alphas) {
    if (!std::isfinite(a)) throw ParameterError("model: alpha is not finite");
    if (mode == Validation::Strict ? !(a > 0.0 && a < 1.0) : !(a >= 0.0 && a <= 1.0)) {
      throw ParameterError("model: alpha " + std::to_string(a) + " outside admissible range");
    }
    total += a;
  }
  if (mode == Validation::Strict ? !(total < 1.0) : !(total <= 1.0 + 1e-12)) {
    throw ParameterError("model: alpha coefficients must sum below one");
  }
  if (mode == Validation::Strict) {
    const double g0 = innovations(0);
    if (!(g0 > 0.0 && g0 < 1.0)) {
      throw ParameterError("model: innovations must satisfy 0 < G(0) < 1");
    }
  }
}

CountSeries::CountSeries(std::vector<Count> presample, std::vector<Count> body)
    : presample_(std::move(presample)), body_(std::move(body)) {
  if (body_.empty()) throw InputError("series: body must contain at least one value");
  auto negative = [](Count c) { return c < 0; };
  if (std::any_of(presample_.begin(), presample_.end(), negative) ||
      std::any_of(body_.begin(), body_.end(), negative)) {
    throw InputError("series: counts must be non-negative");
  }
}

CountSeries CountSeries::from_values(std::span<const Count> values, int presample_len) {
  if (presample_len < 0 || static_cast<std::size_t>(presample_len) >= values.size()) {
    throw InputError("series: need more values than the presample length");
  }
  return CountSeries({values.begin(), values.begin() + presample_len},
                     {values.begin() + presample_len, values.end()});
}

std::vector<Count> CountSeries::values() const {
  std::vector<Count> out(presample_);
  out.insert(out.end(), body_.begin(), body_.end());
  return out;
}

bool CountSeries::is_constant() const {
  const Count first = presample_.empty() ? body_.front() : presample_.front();
  auto differs = [first](Count c) { return c != first; };
  return std::none_of(presample_.begin(), presample_.end(), differs) &&
         std::none_of(body_.begin(), body_.end(), differs);
}

}  // namespace inar
