#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan/grid.hpp"
#include "stefan/material.hpp"
#include "stefan/source.hpp"

namespace stefan {

/// How the capacity e_j multiplying (T^{k+1} - T^k) is evaluated.
enum class CapacityTreatment {
  kLagged,  ///< e_j = c(T_j^k), one linear solve per step.
  kChord,   ///< e_j = (H(T_j^{k+1}) - H(T_j^k)) / (T_j^{k+1} - T_j^k), fixed-point iterated.
};

const char* to_string(CapacityTreatment c);

struct SchemeSettings {
  double gamma = 0.5;
  CapacityTreatment capacity = CapacityTreatment::kLagged;
  int max_iterations = 50;
  double iteration_tolerance = 1e-11;

  bool operator==(const SchemeSettings&) const = default;
};

/// Everything run_simulation needs for one Cartesian 1D run.
struct SimulationConfig {
  Grid1D grid_x{500, 1.0};
  Grid1D grid_t{1500, 3.0};
  MaterialModel material{};
  SourceModel source{NoSource{}};
  SchemeSettings scheme{};
  /// Dimensionless initial temperature (1.0 in reference units).
  double initial_temp = 1.0;
  /// Optional cosine mode: T(x, 0) = initial_temp + amplitude * cos(pi x / L).
  double initial_mode_amplitude = 0.0;
  /// Store every stride-th level; 0 selects 1 for n_t <= 1e4, else n_t / 1e4.
  std::size_t store_stride = 0;

  bool operator==(const SimulationConfig&) const = default;
};

struct Violation {
  std::string field;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

/// Collects every broken invariant; an empty result means the config is valid.
std::vector<Violation> validate_config(const SimulationConfig& cfg);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Returns cfg unchanged when valid; throws ConfigError otherwise.
const SimulationConfig& require_valid(const SimulationConfig& cfg);

std::size_t effective_store_stride(std::size_t requested, std::size_t n_t);

}  // namespace stefan
