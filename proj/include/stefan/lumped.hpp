#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stefan/material.hpp"

namespace stefan {

using TimeFunction = std::function<double(double)>;

struct LumpedOptions {
  double initial_temp = 1.0;
  /// Plateau band half-width in units of the smoothing width.
  double plateau_band = 2.0;
};

/// Spatially uniform solution of (c(T)) dT/dt = q(t), integrated in enthalpy
/// form: H(t) = H(0) + \int_0^t q, T = H^{-1}.
struct LumpedTrace {
  std::vector<double> times;
  std::vector<double> temps;
  std::vector<double> enthalpy;
  /// Times at which T enters and leaves |T - T*| <= band (interpolated in H).
  std::optional<double> plateau_start;
  std::optional<double> plateau_end;

  bool has_plateau() const { return plateau_start.has_value() && plateau_end.has_value(); }
  double delta_t() const { return has_plateau() ? *plateau_end - *plateau_start : 0.0; }
};

LumpedTrace solve_lumped(const MaterialModel& mat, const TimeFunction& q_of_t, double t_max,
                         std::size_t n_steps, const LumpedOptions& options = {});

class NoPlateauError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransitionBoundReport {
  double delta_t = 0.0;
  /// Max of q over [plateau_start, plateau_end].
  double max_power = 0.0;
  /// latent_heat / max_power.
  double latent_time = 0.0;
  /// 4 * smoothing_width * base_capacity / max_power.
  double tolerance = 0.0;
  bool satisfied = false;
};

/// Checks delta_t >= latent_heat / Q - tolerance, Q the maximal power over the plateau.
/// Throws NoPlateauError when the trace never completes the transition.
TransitionBoundReport check_transition_bound(const LumpedTrace& trace, const MaterialModel& mat,
                                             const TimeFunction& q_of_t);

}  // namespace stefan
