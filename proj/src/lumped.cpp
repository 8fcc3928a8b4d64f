#include "stefan/lumped.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/delta_enthalpy.hpp"
#include "stefan/quadrature.hpp"

namespace stefan {

namespace {

// First time the piecewise-linear H(t) reaches level, searching from index `from`.
std::optional<double> first_crossing(const LumpedTrace& tr, double level, std::size_t from,
                                     bool upward) {
  for (std::size_t i = std::max<std::size_t>(from, 1); i < tr.times.size(); ++i) {
    const double a = tr.enthalpy[i - 1], b = tr.enthalpy[i];
    const bool hit = upward ? (a < level && b >= level) : (a > level && b <= level);
    if (hit) {
      const double w = (level - a) / (b - a);
      return tr.times[i - 1] + w * (tr.times[i] - tr.times[i - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace

LumpedTrace solve_lumped(const MaterialModel& mat, const TimeFunction& q_of_t, double t_max,
                         std::size_t n_steps, const LumpedOptions& options) {
  if (n_steps == 0 || !(t_max > 0.0)) throw std::invalid_argument("solve_lumped: empty time range");
  const auto cap = capacity_model(mat);
  LumpedTrace tr;
  tr.times.resize(n_steps + 1);
  tr.temps.resize(n_steps + 1);
  tr.enthalpy.resize(n_steps + 1);

  const double h = t_max / static_cast<double>(n_steps);
  double H = cap.enthalpy(options.initial_temp);
  tr.times[0] = 0.0;
  tr.temps[0] = options.initial_temp;
  tr.enthalpy[0] = H;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    const double a = h * static_cast<double>(i - 1);
    const double b = h * static_cast<double>(i);
    H += integrate(q_of_t, a, b, 1e-15, 1e-13);
    tr.times[i] = b;
    tr.enthalpy[i] = H;
    tr.temps[i] = cap.temperature_from_enthalpy(H);
  }

  const double band = options.plateau_band * mat.smoothing_width;
  const double h_lo = cap.enthalpy(mat.transition_temp - band);
  const double h_hi = cap.enthalpy(mat.transition_temp + band);
  if (tr.enthalpy[0] >= h_lo) {
    tr.plateau_start = 0.0;
  } else {
    tr.plateau_start = first_crossing(tr, h_lo, 1, true);
  }
  if (tr.plateau_start) {
    const auto from = static_cast<std::size_t>(
        std::lower_bound(tr.times.begin(), tr.times.end(), *tr.plateau_start) - tr.times.begin());
    tr.plateau_end = first_crossing(tr, h_hi, from, true);
    if (!tr.plateau_end) tr.plateau_start.reset();
  }
  return tr;
}

TransitionBoundReport check_transition_bound(const LumpedTrace& trace, const MaterialModel& mat,
                                             const TimeFunction& q_of_t) {
  if (!trace.has_plateau())
    throw NoPlateauError("check_transition_bound: the source never drives T through T*");
  const double t0 = *trace.plateau_start;
  const double t1 = *trace.plateau_end;
  constexpr int kSamples = 2000;
  double q_max = std::max(q_of_t(t0), q_of_t(t1));
  for (int i = 1; i < kSamples; ++i)
    q_max = std::max(q_max, q_of_t(t0 + (t1 - t0) * i / kSamples));

  TransitionBoundReport r;
  r.delta_t = t1 - t0;
  r.max_power = q_max;
  r.latent_time = mat.latent_heat / q_max;
  r.tolerance = 4.0 * mat.smoothing_width * mat.base_capacity / q_max;
  r.satisfied = r.delta_t >= r.latent_time - r.tolerance;
  return r;
}

}  // namespace stefan
