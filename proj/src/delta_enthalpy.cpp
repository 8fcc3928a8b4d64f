#include "stefan/delta_enthalpy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stefan {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double delta_value(const SmoothedDelta& d, double T) {
  const double z = (T - d.center) / d.width;
  return std::exp(-0.5 * z * z) / (d.width * std::sqrt(2.0 * std::numbers::pi));
}

double CapacityModel::operator()(double T) const {
  double c = base + slope * (T - 1.0);
  if (latent != 0.0) c += latent * delta_value(delta, T);
  return c;
}

double CapacityModel::enthalpy(double T) const {
  const double dT = T - 1.0;
  double H = base * dT + 0.5 * slope * dT * dT;
  if (latent != 0.0) {
    // Difference of two CDFs; erfc keeps the left tail accurate.
    H += latent * (normal_cdf((T - delta.center) / delta.width) -
                   normal_cdf((1.0 - delta.center) / delta.width));
  }
  return H;
}

double CapacityModel::temperature_from_enthalpy(double H) const {
  // Bracket, then safeguarded Newton on a strictly increasing function.
  double lo = 1.0, hi = 1.0;
  double step = 1.0;
  while (enthalpy(lo) > H) {
    lo -= step;
    step *= 2.0;
    if (step > 1e12) throw std::domain_error("temperature_from_enthalpy: cannot bracket");
  }
  step = 1.0;
  while (enthalpy(hi) < H) {
    hi += step;
    step *= 2.0;
    if (step > 1e12) throw std::domain_error("temperature_from_enthalpy: cannot bracket");
  }
  double T = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = enthalpy(T) - H;
    if (f > 0.0) hi = T; else lo = T;
    const double c = (*this)(T);
    double next = T - f / c;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - T) <= 1e-15 * (1.0 + std::abs(T)) || hi - lo <= 1e-15 * (1.0 + std::abs(T)))
      return next;
    T = next;
  }
  return T;
}

double CapacityModel::chord(double Ta, double Tb) const {
  const double dT = Tb - Ta;
  if (std::abs(dT) <= 1e-9 * (1.0 + std::abs(Ta))) return (*this)(0.5 * (Ta + Tb));
  return (enthalpy(Tb) - enthalpy(Ta)) / dT;
}

CapacityModel capacity_model(const MaterialModel& mat) {
  return CapacityModel{mat.base_capacity, 0.0, mat.latent_heat,
                       SmoothedDelta{mat.transition_temp, mat.smoothing_width}};
}

double effective_capacity(const MaterialModel& mat, double T) { return capacity_model(mat)(T); }

double enthalpy(const MaterialModel& mat, double T) { return capacity_model(mat).enthalpy(T); }

double temperature_from_enthalpy(const MaterialModel& mat, double H) {
  return capacity_model(mat).temperature_from_enthalpy(H);
}

}  // namespace stefan
