#pragma once

namespace stefan {

/// Thermal conductivity k(T) = reference + slope * (T - 1).
/// The constant case (slope == 0) is the default.
struct ConductivityModel {
  double reference = 1.0;
  double slope = 0.0;

  double operator()(double T) const { return reference + slope * (T - 1.0); }
  bool operator==(const ConductivityModel&) const = default;
};

/// Dimensionless thermophysics of a single-component material.
///
/// Volumetric capacity is base_capacity + latent_heat * delta(T - transition_temp),
/// where delta is a unit-mass Gaussian with standard deviation smoothing_width.
struct MaterialModel {
  double base_capacity = 1.0;
  ConductivityModel conductivity{};
  double latent_heat = 0.0;
  double transition_temp = 2.0;
  double smoothing_width = 0.05;

  bool operator==(const MaterialModel&) const = default;
};

/// Reference scales that convert dimensionless results to physical units.
/// Solvers never see these; they belong to the I/O layer.
struct ScaleSet {
  double T0 = 293.0;   // K
  double l0 = 1.0e-5;  // m
  double tau = 3.0e-7; // s

  bool valid() const { return T0 > 0.0 && l0 > 0.0 && tau > 0.0; }

  double temperature_to_physical(double T) const { return T * T0; }
  double temperature_from_physical(double T_kelvin) const { return T_kelvin / T0; }
  double length_to_physical(double x) const { return x * l0; }
  double length_from_physical(double x_m) const { return x_m / l0; }
  double time_to_physical(double t) const { return t * tau; }
  double time_from_physical(double t_s) const { return t_s / tau; }

  bool operator==(const ScaleSet&) const = default;
};

}  // namespace stefan
