#include "stefan/source.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stefan/delta_enthalpy.hpp"
#include "stefan/quadrature.hpp"

namespace stefan {

namespace {

constexpr double kExpClamp = 700.0;

// Antiderivative of the logistic step: z - log(1 + exp(mu (z - edge))) / mu.
double logistic_primitive(double z, double edge, double mu) {
  const double u = mu * (z - edge);
  const double softplus = u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
  return z - softplus / mu;
}

double logistic_integral(double a, double b, double edge, double mu) {
  return logistic_primitive(b, edge, mu) - logistic_primitive(a, edge, mu);
}

}  // namespace

double logistic_step(double z, double edge, double steepness) {
  const double u = std::clamp(steepness * (z - edge), -kExpClamp, kExpClamp);
  return 1.0 / (1.0 + std::exp(u));
}

double source_value(const LogisticBeamSource& s, double x, double t) {
  return s.amplitude * logistic_step(x, s.x_edge, s.steepness_x) *
         logistic_step(t, s.t_edge, s.steepness_t);
}

double GaussianPulseSource::peak_power() const {
  // 2 pi radius^2 * duration sqrt(2 pi) Phi(t_peak / duration): the time
  // integral is truncated at t = 0.
  const double norm = 2.0 * std::numbers::pi * radius * radius * duration *
                      std::sqrt(2.0 * std::numbers::pi) * normal_cdf(t_peak / duration);
  return energy / norm;
}

double source_value(const GaussianPulseSource& s, double r, double t) {
  if (s.energy == 0.0) return 0.0;
  const double zr = r / s.radius;
  const double zt = (t - s.t_peak) / s.duration;
  return s.peak_power() * std::exp(-0.5 * zr * zr) * std::exp(-0.5 * zt * zt);
}

double source_value(const TabulatedSource& s, double x, double t) {
  const auto& xs = s.x_nodes;
  const auto& ts = s.t_nodes;
  if (xs.empty() || ts.empty()) return 0.0;
  if (x < xs.front() || x > xs.back() || t < ts.front() || t > ts.back()) return 0.0;
  auto bracket = [](const std::vector<double>& nodes, double v) {
    if (nodes.size() == 1) return std::pair<std::size_t, double>{0, 0.0};
    auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
    std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    i = std::min(i, nodes.size() - 2);
    const double w = (v - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return std::pair<std::size_t, double>{i, w};
  };
  const auto [ix, wx] = bracket(xs, x);
  const auto [it, wt] = bracket(ts, t);
  const std::size_t nx = xs.size();
  auto at = [&](std::size_t i_t, std::size_t i_x) { return s.values[i_t * nx + i_x]; };
  const std::size_t ix1 = std::min(ix + 1, nx - 1);
  const std::size_t it1 = std::min(it + 1, ts.size() - 1);
  const double lo = (1.0 - wx) * at(it, ix) + wx * at(it, ix1);
  const double hi = (1.0 - wx) * at(it1, ix) + wx * at(it1, ix1);
  return (1.0 - wt) * lo + wt * hi;
}

double source_value(const SourceModel& s, double x, double t) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NoSource>) {
          return 0.0;
        } else if constexpr (std::is_same_v<M, CallbackSource>) {
          return m.fn ? m.fn(x, t) : 0.0;
        } else {
          return source_value(m, x, t);
        }
      },
      s);
}

double deposited_energy(const LogisticBeamSource& s, std::pair<double, double> x_range,
                        std::pair<double, double> t_range) {
  if (s.amplitude == 0.0) return 0.0;
  return s.amplitude *
         logistic_integral(x_range.first, x_range.second, s.x_edge, s.steepness_x) *
         logistic_integral(t_range.first, t_range.second, s.t_edge, s.steepness_t);
}

double deposited_energy(const SourceModel& s, std::pair<double, double> x_range,
                        std::pair<double, double> t_range) {
  if (std::holds_alternative<NoSource>(s)) return 0.0;
  if (const auto* beam = std::get_if<LogisticBeamSource>(&s))
    return deposited_energy(*beam, x_range, t_range);
  auto inner = [&](double x) {
    return integrate([&](double t) { return source_value(s, x, t); }, t_range.first,
                     t_range.second, 1e-13, 1e-10);
  };
  return integrate(inner, x_range.first, x_range.second, 1e-12, 1e-9);
}

void validate_source(const SourceModel& s) {
  if (const auto* beam = std::get_if<LogisticBeamSource>(&s)) {
    if (!(beam->amplitude >= 0.0)) throw std::invalid_argument("source.amplitude must be >= 0");
    if (!(beam->steepness_x > 0.0)) throw std::invalid_argument("source.steepness_x must be > 0");
    if (!(beam->steepness_t > 0.0)) throw std::invalid_argument("source.steepness_t must be > 0");
  } else if (const auto* pulse = std::get_if<GaussianPulseSource>(&s)) {
    if (!(pulse->energy >= 0.0)) throw std::invalid_argument("source.energy must be >= 0");
    if (!(pulse->radius > 0.0)) throw std::invalid_argument("source.radius must be > 0");
    if (!(pulse->duration > 0.0)) throw std::invalid_argument("source.duration must be > 0");
  } else if (const auto* tab = std::get_if<TabulatedSource>(&s)) {
    if (tab->values.size() != tab->x_nodes.size() * tab->t_nodes.size())
      throw std::invalid_argument("tabulated source: values size must be |x| * |t|");
    if (!std::is_sorted(tab->x_nodes.begin(), tab->x_nodes.end()) ||
        !std::is_sorted(tab->t_nodes.begin(), tab->t_nodes.end()))
      throw std::invalid_argument("tabulated source: nodes must be increasing");
  }
}

}  // namespace stefan
