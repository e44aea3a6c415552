#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "inar/applications.hpp"
#include "inar/errors.hpp"
#include "inar/study.hpp"

namespace inar {

/// Invalid study configuration; pointer() is the JSON pointer of the field.
class ConfigError : public InputError {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : InputError(what + " (at " + (pointer.empty() ? std::string("/") : pointer) + ")"),
        pointer_(std::move(pointer)) {}
  [[nodiscard]] const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// One non-negative integer per line; an optional first line "count" is a
/// header; blank lines are skipped. Errors name the 1-based line number.
std::vector<Count> read_counts_csv(std::istream& in);
std::vector<Count> read_counts_csv_file(const std::string& path);
void write_counts_csv(std::ostream& out, const CountSeries& series);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const BootstrapDraws& draws);
nlohmann::json to_json(const FunctionalEstimate& estimate);

/// Parses a study configuration. Unknown keys are rejected.
StudyConfig study_config_from_json(const nlohmann::json& doc);

}  // namespace inar
