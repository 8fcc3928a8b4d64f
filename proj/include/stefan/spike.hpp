#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/delta_enthalpy.hpp"
#include "stefan/grid.hpp"
#include "stefan/material.hpp"
#include "stefan/source.hpp"
#include "stefan/tridiagonal.hpp"

namespace stefan {

/// Two-temperature (electron / lattice) thermophysics around a cylindrical track.
/// Volumetric capacities are density * capacity(T).
struct SpikeMaterial {
  CapacityModel electron_capacity{1.0, 0.0, 0.0, {}};
  CapacityModel lattice_capacity{1.0, 0.0, 0.0, {}};
  ConductivityModel electron_conductivity{};
  ConductivityModel lattice_conductivity{};
  double density = 1.0;
  /// Electron-lattice coupling g (energy per volume, time and degree).
  double coupling = 1.0;

  /// density * C_e(T_e) / g.
  double relaxation_time(double T_e = 1.0) const { return density * electron_capacity(T_e) / coupling; }

  bool operator==(const SpikeMaterial&) const = default;
};

struct SpikeConfig {
  /// r in [0, r_max]; the default r_max of 1 is 1e-5 cm in units of l0 = 1e-7 m.
  Grid1D grid_r{400, 1.0};
  Grid1D grid_t{3000, 30.0};
  SpikeMaterial material{};
  SourceModel source{NoSource{}};
  SchemeSettings scheme{};
  /// Initial temperature and the Dirichlet value at r_max.
  double ambient_temp = 1.0;
  /// Interior starting values; NaN selects ambient_temp.
  double initial_electron_temp = std::numeric_limits<double>::quiet_NaN();
  double initial_lattice_temp = std::numeric_limits<double>::quiet_NaN();
  std::size_t store_stride = 0;

  bool operator==(const SpikeConfig& o) const;
};

std::vector<Violation> validate_spike_config(const SpikeConfig& cfg);

/// Electron and lattice temperatures on the radial grid at one time.
struct TwoTempState {
  Grid1D radial_grid{1, 1.0};
  std::vector<double> temp_e;
  std::vector<double> temp_i;
  double time = 0.0;

  TemperatureField electron_field() const { return TemperatureField(radial_grid, temp_e, time); }
  TemperatureField lattice_field() const { return TemperatureField(radial_grid, temp_i, time); }
};

TwoTempState initial_state(const SpikeConfig& cfg);

/// Control volume of node j: 2 pi r_j h, and pi h^2 / 4 at the axis.
double radial_volume(const Grid1D& grid, std::size_t j);

/// Electron -> lattice energy per unit volume over one step:
/// mu (T_e - T_i) (1 - exp(-kappa h_t)), mu = C_e C_i / (C_e + C_i), kappa = g (1/C_e + 1/C_i).
double coupling_exchange(double c_e, double c_i, double g, double t_e, double t_i, double h_t);

struct SpikeStepSystems {
  TridiagonalSystem electron;
  TridiagonalSystem lattice;
  /// Energy per unit volume moved from electrons to lattice at each node.
  std::vector<double> exchange;
};

/// Flux-form cylindrical Laplacian on half-nodes r_{j+1/2}, zero-gradient axis row,
/// Dirichlet row at r_max. The coupling enters both systems as the same exchange
/// term with opposite signs; the source heats the electrons only.
SpikeStepSystems assemble_radial_step(const TwoTempState& state, const SpikeConfig& cfg, std::size_t k);

/// Same with caller-supplied volumetric capacities for the time-derivative terms.
/// The exchange always uses the point capacities at level k.
SpikeStepSystems assemble_radial_step(const TwoTempState& state, const SpikeConfig& cfg, std::size_t k,
                                      std::span<const double> cap_e, std::span<const double> cap_i);

/// Cumulative energy ledger at one level (per unit track length).
struct SpikeEnergyRecord {
  double time = 0.0;
  double electron_enthalpy = 0.0;
  double lattice_enthalpy = 0.0;
  double coupling_transfer = 0.0;
  double boundary_outflow = 0.0;
  double source_input = 0.0;
};

struct SpikeTrace {
  SpikeConfig config;
  std::vector<TwoTempState> states;
  std::vector<std::size_t> state_levels;
  /// One record per level 0..n_t.
  std::vector<SpikeEnergyRecord> ledger;
  std::size_t unconverged_steps = 0;

  /// |(dE_e + dE_i) - (source - outflow)| / source at the final level.
  double ledger_relative_error() const;
};

SpikeTrace run_spike(const SpikeConfig& cfg);

}  // namespace stefan
