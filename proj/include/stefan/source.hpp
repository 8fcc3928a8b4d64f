#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stefan {

/// q(x, t) == 0.
struct NoSource {
  bool operator==(const NoSource&) const = default;
};

/// Logistic beam deposition
///   q(x, t) = Q / ((1 + exp(mu_x (x - x_edge))) (1 + exp(mu_t (t - t_edge)))).
struct LogisticBeamSource {
  double amplitude = 0.0;
  double x_edge = 0.0;
  double t_edge = 0.0;
  double steepness_x = 100.0;
  double steepness_t = 100.0;

  bool operator==(const LogisticBeamSource&) const = default;
};

/// Separable Gaussian pulse around a cylindrical track,
///   q(r, t) = A exp(-r^2 / (2 radius^2)) exp(-(t - t_peak)^2 / (2 duration^2)),
/// with A chosen so that 2 pi \int_0^inf \int_0^inf q r dr dt == energy
/// (energy per unit track length).
struct GaussianPulseSource {
  double energy = 0.0;
  double radius = 1.0;
  double duration = 1.0;
  double t_peak = 0.0;

  double peak_power() const;
  bool operator==(const GaussianPulseSource&) const = default;
};

/// Bilinear interpolation of values[i_t * x_nodes.size() + i_x] on a tensor
/// grid. Zero outside the tabulated rectangle.
struct TabulatedSource {
  std::vector<double> x_nodes;
  std::vector<double> t_nodes;
  std::vector<double> values;

  bool operator==(const TabulatedSource&) const = default;
};

/// User-supplied q(x, t). Compared by name only.
struct CallbackSource {
  std::string name;
  std::function<double(double, double)> fn;

  bool operator==(const CallbackSource& other) const { return name == other.name; }
};

using SourceModel =
    std::variant<NoSource, LogisticBeamSource, GaussianPulseSource, TabulatedSource, CallbackSource>;

/// Logistic factor 1 / (1 + exp(steepness (z - edge))), exponent clamped to +-700.
double logistic_step(double z, double edge, double steepness);

double source_value(const LogisticBeamSource& s, double x, double t);
double source_value(const GaussianPulseSource& s, double r, double t);
double source_value(const TabulatedSource& s, double x, double t);
double source_value(const SourceModel& s, double x, double t);

/// \int_{x0}^{x1} \int_{t0}^{t1} q(x, t) dt dx.
///
/// The logistic beam integrates in closed form (product of softplus
/// antiderivatives); other models use adaptive nested quadrature.
double deposited_energy(const LogisticBeamSource& s, std::pair<double, double> x_range,
                        std::pair<double, double> t_range);
double deposited_energy(const SourceModel& s, std::pair<double, double> x_range,
                        std::pair<double, double> t_range);

/// Throws std::invalid_argument when parameters break the model's invariants.
void validate_source(const SourceModel& s);

}  // namespace stefan
