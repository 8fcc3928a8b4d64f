#pragma once

#include "stefan/material.hpp"

namespace stefan {

/// Gaussian approximation of delta(T - center); width is the standard deviation.
struct SmoothedDelta {
  double center = 0.0;
  double width = 1.0;

  bool operator==(const SmoothedDelta&) const = default;
};

/// Standard normal cumulative distribution function.
double normal_cdf(double z);

double delta_value(const SmoothedDelta& d, double T);

/// Volumetric capacity base + slope * (T - 1) + latent * delta(T - center).
///
/// MaterialModel maps onto this with slope == 0. The electron subsystem of the
/// two-temperature model uses the slope term.
struct CapacityModel {
  double base = 1.0;
  double slope = 0.0;
  double latent = 0.0;
  SmoothedDelta delta{};

  double operator()(double T) const;

  /// Antiderivative of operator() with enthalpy(1.0) == 0.
  double enthalpy(double T) const;

  /// Inverse of enthalpy(); requires a capacity that stays positive.
  double temperature_from_enthalpy(double H) const;

  /// Mean capacity over [Ta, Tb]: (enthalpy(Tb) - enthalpy(Ta)) / (Tb - Ta).
  /// Falls back to the point value at the midpoint when Ta and Tb coincide.
  double chord(double Ta, double Tb) const;

  bool operator==(const CapacityModel&) const = default;
};

CapacityModel capacity_model(const MaterialModel& mat);

double effective_capacity(const MaterialModel& mat, double T);

/// base_capacity * (T - 1) + latent * (Phi((T - T*)/width) - Phi((1 - T*)/width)).
double enthalpy(const MaterialModel& mat, double T);

double temperature_from_enthalpy(const MaterialModel& mat, double H);

}  // namespace stefan
