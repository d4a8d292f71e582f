#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpspin/dynamics.hpp"
#include "rpspin/montecarlo.hpp"
#include "rpspin/spin_core.hpp"

namespace rpspin {

/// One experiment: a spin system, its Hamiltonian and rates, the theories to
/// integrate, the shared time grid and the Monte-Carlo settings.
struct ExperimentConfig {
  std::string name;
  std::vector<NuclearSpinSpec> nuclei;
  HamiltonianSpec hamiltonian;
  RateParams rates;
  std::vector<TheoryKind> theories;
  double dt = 0.0;
  std::size_t steps = 0;
  /// Window of the unitary reference evolution that fixes c_max. Defaults to
  /// the production grid.
  std::optional<double> coherence_horizon;
  std::optional<double> coherence_dt;
  EnsembleConfig montecarlo;
  std::optional<std::size_t> dump_trajectory;
  std::string output = "out";

  double horizon() const { return dt * static_cast<double>(steps); }
};

/// Thrown for malformed or invalid configuration; what() starts with the
/// dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON document. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config_file(const std::string& path);

/// Serializes back to the same JSON schema.
std::string to_json(const ExperimentConfig& config);

/// Checks every module precondition that can be checked before running:
/// positive grid, rate stability limits, trajectory count (when
/// `need_montecarlo`), non-empty theory list (when `need_theories`).
void validate(const ExperimentConfig& config, bool need_theories, bool need_montecarlo);

std::vector<std::string> preset_names();
/// Built-in experiment presets reproducing the published figures.
ExperimentConfig preset(std::string_view name);

}  // namespace rpspin
