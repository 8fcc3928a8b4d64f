#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/grid.hpp"
#include "stefan/material.hpp"
#include "stefan/solver1d.hpp"

namespace stefan {

/// Positions where the field crosses t_star, sorted ascending.
///
/// Sign changes between adjacent nodes are located by linear interpolation.
/// A run of nodes lying exactly on t_star contributes its two endpoints
/// (one position when the run is a single node).
std::vector<double> locate_fronts(const TemperatureField& field, double t_star);

/// Exterior (outermost) front position per stored time with matched velocities.
struct PhaseFrontTrace {
  std::vector<double> times;
  std::vector<std::vector<double>> fronts;
  /// Largest crossing; NaN when there is none.
  std::vector<double> exterior;
  /// d(exterior)/dt; NaN where the front is not matched to a neighbour.
  std::vector<double> velocities;
  /// Set where the exterior front jumps by more than the gate between stored levels.
  std::vector<bool> unstable;
};

/// max_jump_cells gates matching between consecutive times (in grid cells).
PhaseFrontTrace track_fronts(std::span<const TemperatureField> fields, double t_star,
                             double max_jump_cells = 5.0);

/// Melt thickness on a liquid-left domain: exterior front if the left boundary
/// is above t_star, 0 when no front exists and the field is below t_star.
std::vector<double> melt_thickness(const PhaseFrontTrace& fronts);

struct StefanResidualTrace {
  std::vector<double> times;
  /// phi = k(T_B) dT/dn|_B - k(T_A) dT/dn|_A - latent * V_n, n pointing from liquid into solid.
  std::vector<double> phi;
  std::vector<bool> defined;
  /// T_A = T* + offset * width (liquid side), T_B = T* - offset * width (solid side).
  std::pair<double, double> probe_temps{0.0, 0.0};
  std::vector<double> grad_a;
  std::vector<double> grad_b;
  std::vector<double> velocity;
};

/// Stefan interface residual at every stored time. Gradients are one-sided,
/// second order, taken at the T_A and T_B crossings next to the exterior front
/// using nodes on the side away from the front.
StefanResidualTrace stefan_residual(std::span<const TemperatureField> fields, const MaterialModel& mat,
                                    double probe_offset = 3.0, double max_jump_cells = 5.0);
StefanResidualTrace stefan_residual(const SimulationTrace& trace, double probe_offset = 3.0,
                                    double max_jump_cells = 5.0);

struct TablelandMetrics {
  /// Length of the longest contiguous node run with |T - T*| <= width.
  double width = 0.0;
  /// Cells spanned by that run (nodes - 1).
  std::size_t cells = 0;
  bool extended = false;
  double start = 0.0;
  double end = 0.0;
};

TablelandMetrics tableland_metrics(const TemperatureField& field, double t_star, double band,
                                   std::size_t min_cells = 3);
TablelandMetrics tableland_metrics(const TemperatureField& field, const MaterialModel& mat,
                                   std::size_t min_cells = 3);

/// Exterior crossing of threshold; without a crossing, 0 when the field lies
/// below threshold (all solid) and the domain length when above (all liquid).
double interphase_position(const TemperatureField& field, double threshold);

/// Sensitivity of the interphase position to the transition temperature, from
/// relocating it at t_star +- epsilon on a stored trace.
struct InstabilityTable {
  double epsilon = 0.0;
  double threshold = 0.0;
  std::vector<double> times;
  /// interphase_position at t_star.
  std::vector<double> front;
  /// xi(T* - eps) - xi(T* + eps).
  std::vector<double> shift;
  /// |shift| / (2 eps); 0 when eps = 0.
  std::vector<double> sensitivity;
  std::vector<bool> flagged;
};

InstabilityTable delta_instability_sweep(std::span<const TemperatureField> fields, double t_star,
                                         double epsilon, double threshold);
std::vector<InstabilityTable> delta_instability_sweep(std::span<const TemperatureField> fields,
                                                      double t_star, std::span<const double> epsilons,
                                                      double threshold);

struct ConvergenceLevel {
  std::size_t n_x = 0;
  std::size_t n_t = 0;
  double h_x = 0.0;
  double h_t = 0.0;
  /// Max-norm error at t_max.
  double error = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  /// Least-squares slope of log(error) against log(h_x).
  double order = 0.0;
};

using ReferenceSolution = std::function<double(double x, double t)>;

/// Least-squares slope of log(y) on log(x).
double fit_log_slope(std::span<const double> x, std::span<const double> y);

/// Runs base at each (n_x, n_t) and compares the final field to reference.
/// Throws std::invalid_argument for fewer than three levels or repeated grids.
ConvergenceResult convergence_study(const SimulationConfig& base,
                                    std::span<const std::pair<std::size_t, std::size_t>> levels,
                                    const ReferenceSolution& reference);

/// Same, against a run refined by `ratio` beyond the finest level.
ConvergenceResult convergence_study(const SimulationConfig& base,
                                    std::span<const std::pair<std::size_t, std::size_t>> levels,
                                    std::size_t ratio = 2);

/// Exact solution for a cosine initial mode with no source and no latent heat:
/// T0 + A cos(pi x / L) exp(-(k / c) (pi / L)^2 t).
ReferenceSolution neumann_cosine_mode(const SimulationConfig& cfg);

/// Exterior one-sided gradient and time derivative at the exterior front.
struct ExteriorSurfaceSample {
  double time = 0.0;
  double front = 0.0;
  double gradient = 0.0;
  double time_derivative = 0.0;
  double velocity = 0.0;
};

std::vector<ExteriorSurfaceSample> exterior_surface_samples(std::span<const TemperatureField> fields,
                                                            double t_star, double max_jump_cells = 5.0);

/// Samples with |gradient| < gradient_tol whose |time derivative| exceeds
/// factor * gradient_tol * max(1, max |velocity|).
std::vector<ExteriorSurfaceSample> exterior_surface_violations(std::span<const ExteriorSurfaceSample> samples,
                                                               double gradient_tol, double factor = 1.0);

}  // namespace stefan
