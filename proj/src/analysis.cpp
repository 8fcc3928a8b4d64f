#include "stefan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>

namespace stefan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Derivative at x of the quadratic through (xs[i], ys[i]), i = 0..2.
double quadratic_slope(const double xs[3], const double ys[3], double x) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3, b = (i + 2) % 3;
    const double denom = (xs[i] - xs[a]) * (xs[i] - xs[b]);
    d += ys[i] * ((x - xs[a]) + (x - xs[b])) / denom;
  }
  return d;
}

// One-sided gradient at x (inside cell [i, i+1]) from three nodes leaving the
// cell in direction dir (+1: i+1, i+2, i+3; -1: i, i-1, i-2).
std::optional<double> one_sided_gradient(const TemperatureField& f, std::size_t i, int dir, double x) {
  const auto n = static_cast<long>(f.size());
  const long start = dir > 0 ? static_cast<long>(i) + 1 : static_cast<long>(i);
  const long j0 = start, j1 = start + dir, j2 = start + 2 * dir;
  if (std::min({j0, j1, j2}) < 0 || std::max({j0, j1, j2}) >= n) return std::nullopt;
  const auto& g = f.grid();
  const double xs[3] = {g.node(static_cast<std::size_t>(j0)), g.node(static_cast<std::size_t>(j1)),
                        g.node(static_cast<std::size_t>(j2))};
  const double ys[3] = {f[static_cast<std::size_t>(j0)], f[static_cast<std::size_t>(j1)],
                        f[static_cast<std::size_t>(j2)]};
  return quadratic_slope(xs, ys, x);
}

std::size_t cell_of(const Grid1D& g, double x) {
  const double s = std::floor(x / g.spacing());
  const auto i = static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(g.n_cells() - 1)));
  return i;
}

double interpolate(const TemperatureField& f, double x) {
  const auto& g = f.grid();
  const std::size_t i = cell_of(g, x);
  const double w = (x - g.node(i)) / g.spacing();
  return (1.0 - w) * f[i] + w * f[i + 1];
}

double exterior_of(const std::vector<double>& fronts) { return fronts.empty() ? kNaN : fronts.back(); }

// +1 when the liquid (T > T*) lies on the left of x, -1 otherwise.
int liquid_side(const TemperatureField& f, double x, double t_star) {
  const std::size_t i = cell_of(f.grid(), x);
  if (f[i] != f[i + 1]) return f[i] > f[i + 1] ? +1 : -1;
  return f[0] > t_star ? +1 : -1;
}

}  // namespace

std::vector<double> locate_fronts(const TemperatureField& field, double t_star) {
  std::vector<double> out;
  const auto& g = field.grid();
  const std::size_t n = field.size();
  std::size_t j = 0;
  while (j < n) {
    const int s = sign_of(field[j] - t_star);
    if (s == 0) {
      std::size_t end = j;
      while (end + 1 < n && sign_of(field[end + 1] - t_star) == 0) ++end;
      out.push_back(g.node(j));
      if (end > j) out.push_back(g.node(end));
      j = end + 1;
      continue;
    }
    if (j + 1 < n) {
      const int s_next = sign_of(field[j + 1] - t_star);
      if (s * s_next < 0) {
        const double w = (t_star - field[j]) / (field[j + 1] - field[j]);
        out.push_back(g.node(j) + w * g.spacing());
      }
    }
    ++j;
  }
  return out;
}

PhaseFrontTrace track_fronts(std::span<const TemperatureField> fields, double t_star, double max_jump_cells) {
  PhaseFrontTrace tr;
  const std::size_t m = fields.size();
  tr.times.resize(m);
  tr.fronts.resize(m);
  tr.exterior.resize(m);
  tr.velocities.assign(m, kNaN);
  tr.unstable.assign(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    tr.times[k] = fields[k].time();
    tr.fronts[k] = locate_fronts(fields[k], t_star);
    tr.exterior[k] = exterior_of(tr.fronts[k]);
  }
  // matched[k]: exterior fronts at k and k + 1 are the same front.
  std::vector<bool> matched(m > 0 ? m - 1 : 0, false);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double a = tr.exterior[k], b = tr.exterior[k + 1];
    if (std::isnan(a) || std::isnan(b)) continue;
    const double gate = max_jump_cells * fields[k].grid().spacing();
    if (std::abs(b - a) <= gate) {
      matched[k] = true;
    } else {
      tr.unstable[k] = true;
      tr.unstable[k + 1] = true;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (std::isnan(tr.exterior[k])) continue;
    const bool left = k > 0 && matched[k - 1];
    const bool right = k + 1 < m && matched[k];
    if (left && right) {
      tr.velocities[k] = (tr.exterior[k + 1] - tr.exterior[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
    } else if (right) {
      tr.velocities[k] = (tr.exterior[k + 1] - tr.exterior[k]) / (tr.times[k + 1] - tr.times[k]);
    } else if (left) {
      tr.velocities[k] = (tr.exterior[k] - tr.exterior[k - 1]) / (tr.times[k] - tr.times[k - 1]);
    }
  }
  return tr;
}

std::vector<double> melt_thickness(const PhaseFrontTrace& fronts) {
  std::vector<double> out(fronts.exterior.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::isnan(fronts.exterior[k]) ? 0.0 : fronts.exterior[k];
  return out;
}

StefanResidualTrace stefan_residual(std::span<const TemperatureField> fields, const MaterialModel& mat,
                                    double probe_offset, double max_jump_cells) {
  const double t_star = mat.transition_temp;
  const double t_a = t_star + probe_offset * mat.smoothing_width;
  const double t_b = t_star - probe_offset * mat.smoothing_width;
  const auto fronts = track_fronts(fields, t_star, max_jump_cells);

  StefanResidualTrace out;
  const std::size_t m = fields.size();
  out.times = fronts.times;
  out.phi.assign(m, kNaN);
  out.defined.assign(m, false);
  out.grad_a.assign(m, kNaN);
  out.grad_b.assign(m, kNaN);
  out.velocity = fronts.velocities;
  out.probe_temps = {t_a, t_b};

  for (std::size_t k = 0; k < m; ++k) {
    const double xi = fronts.exterior[k];
    const double v = fronts.velocities[k];
    if (std::isnan(xi) || std::isnan(v) || fronts.unstable[k]) continue;
    const auto& f = fields[k];
    const int sigma = liquid_side(f, xi, t_star);

    // Nearest T_A crossing on the liquid side and T_B crossing on the solid side.
    std::optional<double> x_a, x_b;
    for (double x : locate_fronts(f, t_a)) {
      if (sigma * (xi - x) >= 0.0 && (!x_a || std::abs(x - xi) < std::abs(*x_a - xi))) x_a = x;
    }
    for (double x : locate_fronts(f, t_b)) {
      if (sigma * (x - xi) >= 0.0 && (!x_b || std::abs(x - xi) < std::abs(*x_b - xi))) x_b = x;
    }
    if (!x_a || !x_b) continue;

    const auto g_a = one_sided_gradient(f, cell_of(f.grid(), *x_a), -sigma, *x_a);
    const auto g_b = one_sided_gradient(f, cell_of(f.grid(), *x_b), +sigma, *x_b);
    if (!g_a || !g_b) continue;

    const double dn_a = sigma * *g_a;
    const double dn_b = sigma * *g_b;
    out.grad_a[k] = *g_a;
    out.grad_b[k] = *g_b;
    out.phi[k] = mat.conductivity(t_b) * dn_b - mat.conductivity(t_a) * dn_a - mat.latent_heat * sigma * v;
    out.defined[k] = true;
  }
  return out;
}

StefanResidualTrace stefan_residual(const SimulationTrace& trace, double probe_offset, double max_jump_cells) {
  return stefan_residual(trace.fields, trace.config.material, probe_offset, max_jump_cells);
}

TablelandMetrics tableland_metrics(const TemperatureField& field, double t_star, double band,
                                   std::size_t min_cells) {
  TablelandMetrics best;
  std::size_t best_nodes = 0;
  const auto& g = field.grid();
  std::size_t j = 0;
  const std::size_t n = field.size();
  while (j < n) {
    if (std::abs(field[j] - t_star) > band) {
      ++j;
      continue;
    }
    std::size_t end = j;
    while (end + 1 < n && std::abs(field[end + 1] - t_star) <= band) ++end;
    const std::size_t cells = end - j;
    if (cells + 1 > best_nodes) {
      best_nodes = cells + 1;
      best.cells = cells;
      best.width = static_cast<double>(cells) * g.spacing();
      best.start = g.node(j);
      best.end = g.node(end);
    }
    j = end + 1;
  }
  best.extended = best.cells >= min_cells;
  return best;
}

TablelandMetrics tableland_metrics(const TemperatureField& field, const MaterialModel& mat, std::size_t min_cells) {
  return tableland_metrics(field, mat.transition_temp, mat.smoothing_width, min_cells);
}

double interphase_position(const TemperatureField& field, double threshold) {
  const double x = exterior_of(locate_fronts(field, threshold));
  if (!std::isnan(x)) return x;
  return field[0] < threshold ? 0.0 : field.grid().length();
}

InstabilityTable delta_instability_sweep(std::span<const TemperatureField> fields, double t_star,
                                         double epsilon, double threshold) {
  InstabilityTable t;
  t.epsilon = epsilon;
  t.threshold = threshold;
  const std::size_t m = fields.size();
  t.times.resize(m);
  t.front.resize(m);
  t.shift.assign(m, 0.0);
  t.sensitivity.assign(m, 0.0);
  t.flagged.assign(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    t.times[k] = fields[k].time();
    t.front[k] = interphase_position(fields[k], t_star);
    if (epsilon == 0.0) continue;
    const double lo = interphase_position(fields[k], t_star - epsilon);
    const double hi = interphase_position(fields[k], t_star + epsilon);
    t.shift[k] = lo - hi;
    t.sensitivity[k] = std::abs(lo - hi) / (2.0 * std::abs(epsilon));
    t.flagged[k] = t.sensitivity[k] > threshold;
  }
  return t;
}

std::vector<InstabilityTable> delta_instability_sweep(std::span<const TemperatureField> fields, double t_star,
                                                      std::span<const double> epsilons, double threshold) {
  std::vector<InstabilityTable> out;
  out.reserve(epsilons.size());
  for (double e : epsilons) out.push_back(delta_instability_sweep(fields, t_star, e, threshold));
  return out;
}

double fit_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_log_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_log_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

namespace {

void check_levels(std::span<const std::pair<std::size_t, std::size_t>> levels) {
  if (levels.size() < 3) throw std::invalid_argument("convergence_study: need at least 3 refinement levels");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::set<std::size_t> nx_seen;
  for (const auto& l : levels) {
    if (!seen.insert(l).second || !nx_seen.insert(l.first).second)
      throw std::invalid_argument("convergence_study: degenerate refinement (repeated grid)");
  }
}

SimulationConfig with_grid(const SimulationConfig& base, std::size_t n_x, std::size_t n_t) {
  SimulationConfig cfg = base;
  cfg.grid_x = Grid1D(n_x, base.grid_x.length());
  cfg.grid_t = Grid1D(n_t, base.grid_t.length());
  cfg.store_stride = n_t;  // only the endpoints are needed
  return cfg;
}

ConvergenceResult finish(std::vector<ConvergenceLevel> levels) {
  ConvergenceResult r;
  std::vector<double> h, e;
  for (const auto& l : levels) {
    h.push_back(l.h_x);
    e.push_back(l.error);
  }
  r.levels = std::move(levels);
  r.order = fit_log_slope(h, e);
  return r;
}

}  // namespace

ConvergenceResult convergence_study(const SimulationConfig& base,
                                    std::span<const std::pair<std::size_t, std::size_t>> levels,
                                    const ReferenceSolution& reference) {
  check_levels(levels);
  std::vector<ConvergenceLevel> out;
  for (const auto& [n_x, n_t] : levels) {
    const auto cfg = with_grid(base, n_x, n_t);
    const auto trace = run_simulation(cfg);
    const auto& final = trace.fields.back();
    double err = 0.0;
    for (std::size_t j = 0; j < final.size(); ++j)
      err = std::max(err, std::abs(final[j] - reference(cfg.grid_x.node(j), final.time())));
    out.push_back({n_x, n_t, cfg.grid_x.spacing(), cfg.grid_t.spacing(), err});
  }
  return finish(std::move(out));
}

ConvergenceResult convergence_study(const SimulationConfig& base,
                                    std::span<const std::pair<std::size_t, std::size_t>> levels,
                                    std::size_t ratio) {
  check_levels(levels);
  if (ratio < 2) throw std::invalid_argument("convergence_study: reference ratio must be >= 2");
  std::size_t fine_x = 0, fine_t = 0;
  for (const auto& [n_x, n_t] : levels) {
    fine_x = std::max(fine_x, n_x);
    fine_t = std::max(fine_t, n_t);
  }
  fine_x *= ratio;
  fine_t *= ratio;
  for (const auto& [n_x, n_t] : levels) {
    (void)n_t;
    if (fine_x % n_x != 0)
      throw std::invalid_argument("convergence_study: level n_x must divide the reference n_x");
  }
  const auto ref = run_simulation(with_grid(base, fine_x, fine_t));
  const auto& ref_final = ref.fields.back();
  std::vector<ConvergenceLevel> out;
  for (const auto& [n_x, n_t] : levels) {
    const auto cfg = with_grid(base, n_x, n_t);
    const auto trace = run_simulation(cfg);
    const auto& final = trace.fields.back();
    const std::size_t step = fine_x / n_x;
    double err = 0.0;
    for (std::size_t j = 0; j < final.size(); ++j) err = std::max(err, std::abs(final[j] - ref_final[j * step]));
    out.push_back({n_x, n_t, cfg.grid_x.spacing(), cfg.grid_t.spacing(), err});
  }
  return finish(std::move(out));
}

ReferenceSolution neumann_cosine_mode(const SimulationConfig& cfg) {
  const double T0 = cfg.initial_temp;
  const double A = cfg.initial_mode_amplitude;
  const double L = cfg.grid_x.length();
  const double rate = cfg.material.conductivity(T0) / cfg.material.base_capacity *
                      (std::numbers::pi / L) * (std::numbers::pi / L);
  return [=](double x, double t) { return T0 + A * std::cos(std::numbers::pi * x / L) * std::exp(-rate * t); };
}

std::vector<ExteriorSurfaceSample> exterior_surface_samples(std::span<const TemperatureField> fields,
                                                            double t_star, double max_jump_cells) {
  const auto tr = track_fronts(fields, t_star, max_jump_cells);
  std::vector<ExteriorSurfaceSample> out;
  for (std::size_t k = 1; k + 1 < fields.size(); ++k) {
    const double xi = tr.exterior[k];
    if (std::isnan(xi) || std::isnan(tr.velocities[k]) || tr.unstable[k]) continue;
    const auto& f = fields[k];
    const int sigma = liquid_side(f, xi, t_star);
    const auto g = one_sided_gradient(f, cell_of(f.grid(), xi), +sigma, xi);
    if (!g) continue;
    const double dt = fields[k + 1].time() - fields[k - 1].time();
    const double dTdt = (interpolate(fields[k + 1], xi) - interpolate(fields[k - 1], xi)) / dt;
    out.push_back({f.time(), xi, *g, dTdt, tr.velocities[k]});
  }
  return out;
}

std::vector<ExteriorSurfaceSample> exterior_surface_violations(std::span<const ExteriorSurfaceSample> samples,
                                                               double gradient_tol, double factor) {
  double v_max = 1.0;
  for (const auto& s : samples) v_max = std::max(v_max, std::abs(s.velocity));
  std::vector<ExteriorSurfaceSample> out;
  for (const auto& s : samples) {
    if (std::abs(s.gradient) < gradient_tol && std::abs(s.time_derivative) > factor * gradient_tol * v_max)
      out.push_back(s);
  }
  return out;
}

}  // namespace stefan
