#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/grid.hpp"
#include "stefan/tridiagonal.hpp"

namespace stefan {

class SolverError : public std::runtime_error {
 public:
  SolverError(std::size_t step, const std::string& what) : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Diagnostics for the step from level - 1 to level.
struct TimeStepReport {
  std::size_t level = 0;
  double time = 0.0;
  /// Source energy deposited during the step (trapezoid in x, midpoint in t).
  double energy_in = 0.0;
  /// Change of the discrete enthalpy sum over the step.
  double enthalpy_change = 0.0;
  /// Relative residual of the last linear solve.
  double residual_norm = 0.0;
  int iterations = 1;
  bool converged = true;
  bool diagonally_dominant = true;
};

struct SimulationTrace {
  SimulationConfig config;
  /// Stored levels; always includes level 0 and level n_t.
  std::vector<TemperatureField> fields;
  std::vector<std::size_t> field_levels;
  /// One report per step, steps[k] covers level k -> k + 1.
  std::vector<TimeStepReport> steps;
  /// max_j T_j at every level 0..n_t.
  std::vector<double> max_temperature;

  const Grid1D& grid() const { return config.grid_x; }
  double total_energy_in() const;
  double total_enthalpy_change() const;
  /// |total enthalpy change - total deposited| / total deposited.
  double ledger_relative_error() const;
  std::size_t unconverged_steps() const;
};

/// Trapezoid weight of node j (1/2 at both ends) times the spacing.
double node_weight(const Grid1D& grid, std::size_t j);

/// Discrete enthalpy integral sum_j w_j H(T_j).
double field_enthalpy(const TemperatureField& field, const MaterialModel& mat);

TemperatureField initial_field(const SimulationConfig& cfg);

/// Linear system for level k + 1 given level k with capacities e_j = c(T_j^k)
/// and conductivities frozen at level k. Ghost points T_{-1} = T_1 and
/// T_{n+1} = T_{n-1} fold into the first and last rows.
TridiagonalSystem assemble_step(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k);

/// Same system with caller-supplied capacities (one per node).
TridiagonalSystem assemble_step(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k,
                                std::span<const double> capacity);

/// Advances one level. Returns the field at level k + 1 and fills report.
TemperatureField advance(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k,
                         TimeStepReport& report);

/// Marches from the initial field to t_max. Throws ConfigError, SingularSystemError
/// or SolverError (non-finite field, with the offending step).
SimulationTrace run_simulation(const SimulationConfig& cfg);

}  // namespace stefan
