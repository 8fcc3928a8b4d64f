#include "stefan/solver1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stefan/delta_enthalpy.hpp"

namespace stefan {

double SimulationTrace::total_energy_in() const {
  double e = 0.0;
  for (const auto& s : steps) e += s.energy_in;
  return e;
}

double SimulationTrace::total_enthalpy_change() const {
  double e = 0.0;
  for (const auto& s : steps) e += s.enthalpy_change;
  return e;
}

double SimulationTrace::ledger_relative_error() const {
  const double in = total_energy_in();
  const double dh = total_enthalpy_change();
  if (in == 0.0) return std::abs(dh);
  return std::abs(dh - in) / std::abs(in);
}

std::size_t SimulationTrace::unconverged_steps() const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const auto& s) { return !s.converged; }));
}

double node_weight(const Grid1D& grid, std::size_t j) {
  const double h = grid.spacing();
  return (j == 0 || j == grid.n_cells()) ? 0.5 * h : h;
}

double field_enthalpy(const TemperatureField& field, const MaterialModel& mat) {
  const auto cap = capacity_model(mat);
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j)
    sum += node_weight(field.grid(), j) * cap.enthalpy(field[j]);
  return sum;
}

TemperatureField initial_field(const SimulationConfig& cfg) {
  const auto& g = cfg.grid_x;
  std::vector<double> v(g.node_count(), cfg.initial_temp);
  if (cfg.initial_mode_amplitude != 0.0) {
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] += cfg.initial_mode_amplitude * std::cos(std::numbers::pi * g.node(j) / g.length());
  }
  return TemperatureField(g, std::move(v), 0.0);
}

namespace {

constexpr int kPicardSweeps = 8;

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
  double c = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) c = std::max(c, std::abs(a[j] - b[j]));
  return c;
}

double scale_of(const std::vector<double>& v) {
  double s = 1.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Newton on the nodal enthalpies for
//   (H_j - H_j^k) / h_t - gamma (L T)_j - (1 - gamma) (L T^k)_j - q_j = 0,  T_j = T(H_j).
// dT/dH = 1 / c is bounded, so the iteration is far better behaved than in T.
// A backtracking search on the residual keeps it monotone. Returns convergence.
bool enthalpy_newton(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k,
                     const CapacityModel& cap, std::vector<double>& T, int max_iterations, int& used) {
  const std::size_t n = T.size();
  const double ht = cfg.grid_t.spacing();
  const std::vector<double> ones(n, 1.0);
  // With unit capacity, (sys0 T)_j - rhs0_j = (T_j - T_j^k) / h_t - gamma (L T)_j - (rest)_j.
  const auto sys0 = assemble_step(prev, cfg, k, ones);

  std::vector<double> h_prev(n), H(n), G(n);
  for (std::size_t j = 0; j < n; ++j) {
    h_prev[j] = cap.enthalpy(prev[j]);
    H[j] = cap.enthalpy(T[j]);
  }
  auto residual = [&](const std::vector<double>& t, const std::vector<double>& h, std::vector<double>& g) {
    const auto a = sys0.apply(t);
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      g[j] = (h[j] - h_prev[j] - (t[j] - prev[j])) / ht + a[j] - sys0.rhs[j];
      norm = std::max(norm, std::abs(g[j]));
    }
    return norm;
  };
  double norm = residual(T, H, G);

  TridiagonalSystem J(n);
  std::vector<double> Hn(n), Tn(n), Gn(n);
  for (used = 0; used < max_iterations;) {
    ++used;
    for (std::size_t j = 0; j < n; ++j) {
      const double inv_c = 1.0 / cap(T[j]);
      J.diag[j] = 1.0 / ht + (sys0.diag[j] - 1.0 / ht) * inv_c;
      if (j > 0) J.upper[j - 1] = sys0.upper[j - 1] * inv_c;
      if (j + 1 < n) J.lower[j + 1] = sys0.lower[j + 1] * inv_c;
      J.rhs[j] = -G[j];
    }
    const auto delta = thomas_solve(J);

    double step = 1.0, norm_new = norm;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) {
        Hn[j] = H[j] + step * delta[j];
        Tn[j] = cap.temperature_from_enthalpy(Hn[j]);
      }
      norm_new = residual(Tn, Hn, Gn);
      if (norm_new < norm || norm_new == 0.0) break;
    }
    const double change = max_change(Tn, T);
    T.swap(Tn);
    H.swap(Hn);
    G.swap(Gn);
    norm = norm_new;
    if (change <= cfg.scheme.iteration_tolerance * scale_of(T)) return true;
  }
  return false;
}

}  // namespace

TridiagonalSystem assemble_step(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k) {
  const auto cap = capacity_model(cfg.material);
  std::vector<double> e(prev.size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = cap(prev[j]);
  return assemble_step(prev, cfg, k, e);
}

TridiagonalSystem assemble_step(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k,
                                std::span<const double> capacity) {
  const double hx = cfg.grid_x.spacing();
  const double ht = cfg.grid_t.spacing();
  if (!(hx > 0.0) || !(ht > 0.0)) throw std::invalid_argument("assemble_step: non-positive step");
  const std::size_t n = prev.size();
  if (n != cfg.grid_x.node_count() || capacity.size() != n)
    throw std::invalid_argument("assemble_step: field does not match the configured grid");

  const double gamma = cfg.scheme.gamma;
  const double inv_h2 = 1.0 / (hx * hx);
  const double t_half = cfg.grid_t.node(k) + 0.5 * ht;

  // Face conductivities k_{j+1/2}, frozen at level k.
  std::vector<double> kface(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    kface[j] = 0.5 * (cfg.material.conductivity(prev[j]) + cfg.material.conductivity(prev[j + 1]));
    if (!(kface[j] > 0.0))
      throw SolverError(k, "assemble_step: non-positive conductivity at face " + std::to_string(j));
  }

  TridiagonalSystem sys(n);
  const std::size_t last = n - 1;
  for (std::size_t j = 0; j < n; ++j) {
    // Mirror faces at the ghost points.
    const double kl = j > 0 ? kface[j - 1] : kface[0];
    const double kr = j < last ? kface[j] : kface[last - 1];
    const double t_left = j > 0 ? prev[j - 1] : prev[1];
    const double t_right = j < last ? prev[j + 1] : prev[last - 1];
    const double lap_old = (kr * (t_right - prev[j]) - kl * (prev[j] - t_left)) * inv_h2;

    const double e = capacity[j];
    sys.diag[j] = e / ht + gamma * (kl + kr) * inv_h2;
    if (j == 0) {
      sys.upper[j] = -gamma * (kl + kr) * inv_h2;
    } else if (j == last) {
      sys.lower[j] = -gamma * (kl + kr) * inv_h2;
    } else {
      sys.lower[j] = -gamma * kl * inv_h2;
      sys.upper[j] = -gamma * kr * inv_h2;
    }
    const double q = source_value(cfg.source, cfg.grid_x.node(j), t_half);
    sys.rhs[j] = e / ht * prev[j] + (1.0 - gamma) * lap_old + q;
  }
  return sys;
}

namespace {

// Right-hand side of the step written for the increment T^{k+1} - T^k:
// (L T^k)_j + q_j in flux form, so a uniform field without source gives exactly 0.
std::vector<double> increment_rhs(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k) {
  const std::size_t n = prev.size();
  const std::size_t last = n - 1;
  const double inv_h2 = 1.0 / (cfg.grid_x.spacing() * cfg.grid_x.spacing());
  const double t_half = cfg.grid_t.node(k) + 0.5 * cfg.grid_t.spacing();
  std::vector<double> kface(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j)
    kface[j] = 0.5 * (cfg.material.conductivity(prev[j]) + cfg.material.conductivity(prev[j + 1]));
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double kl = j > 0 ? kface[j - 1] : kface[0];
    const double kr = j < last ? kface[j] : kface[last - 1];
    const double t_left = j > 0 ? prev[j - 1] : prev[1];
    const double t_right = j < last ? prev[j + 1] : prev[last - 1];
    out[j] = (kr * (t_right - prev[j]) - kl * (prev[j] - t_left)) * inv_h2 +
             source_value(cfg.source, cfg.grid_x.node(j), t_half);
  }
  return out;
}

// Solves sys for the increment (same matrix, rhs replaced) and adds it to prev.
std::vector<double> solve_step(TridiagonalSystem sys, const TemperatureField& prev, const std::vector<double>& inc,
                               SolveDiagnostics* diag) {
  sys.rhs = inc;
  auto delta = thomas_solve(sys, diag);
  for (std::size_t j = 0; j < delta.size(); ++j) delta[j] += prev[j];
  return delta;
}

}  // namespace

TemperatureField advance(const TemperatureField& prev, const SimulationConfig& cfg, std::size_t k,
                         TimeStepReport& report) {
  const auto cap = capacity_model(cfg.material);
  const std::size_t n = prev.size();
  const double ht = cfg.grid_t.spacing();
  const double t_next = cfg.grid_t.node(k + 1);

  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) e[j] = cap(prev[j]);

  SolveDiagnostics diag;
  auto sys = assemble_step(prev, cfg, k, e);
  const auto inc = increment_rhs(prev, cfg, k);
  auto next = solve_step(sys, prev, inc, &diag);
  report.iterations = 1;
  report.converged = true;

  if (cfg.scheme.capacity == CapacityTreatment::kChord) {
    report.converged = false;
    // Picard on the chord capacity first; it usually settles in a few sweeps.
    const int picard_limit = std::min(cfg.scheme.max_iterations, kPicardSweeps);
    int it = 1;
    for (; it < picard_limit; ++it) {
      for (std::size_t j = 0; j < n; ++j) e[j] = cap.chord(prev[j], next[j]);
      sys = assemble_step(prev, cfg, k, e);
      auto candidate = solve_step(sys, prev, inc, &diag);
      const double change = max_change(candidate, next);
      next = std::move(candidate);
      if (change <= cfg.scheme.iteration_tolerance * scale_of(next)) {
        report.converged = true;
        break;
      }
    }
    report.iterations = std::min(it + 1, picard_limit);
    if (!report.converged && it < cfg.scheme.max_iterations) {
      int used = 0;
      report.converged = enthalpy_newton(prev, cfg, k, cap, next, cfg.scheme.max_iterations - it, used);
      report.iterations += used;
      for (std::size_t j = 0; j < n; ++j) e[j] = cap.chord(prev[j], next[j]);
      sys = assemble_step(prev, cfg, k, e);
      diag.diagonally_dominant = is_diagonally_dominant(sys);
      diag.relative_residual = relative_residual(sys, next);
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(next[j]))
      throw SolverError(k, "run_simulation: non-finite temperature at node " + std::to_string(j) +
                               " in step " + std::to_string(k) + " -> " + std::to_string(k + 1));
  }

  report.level = k + 1;
  report.time = t_next;
  report.residual_norm = diag.relative_residual;
  report.diagonally_dominant = diag.diagonally_dominant;

  double energy = 0.0, dh = 0.0;
  const double t_half = cfg.grid_t.node(k) + 0.5 * ht;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = node_weight(cfg.grid_x, j);
    energy += w * ht * source_value(cfg.source, cfg.grid_x.node(j), t_half);
    dh += w * (cap.enthalpy(next[j]) - cap.enthalpy(prev[j]));
  }
  report.energy_in = energy;
  report.enthalpy_change = dh;
  return TemperatureField(cfg.grid_x, std::move(next), t_next);
}

SimulationTrace run_simulation(const SimulationConfig& cfg) {
  require_valid(cfg);
  SimulationTrace trace;
  trace.config = cfg;
  const std::size_t n_t = cfg.grid_t.n_cells();
  const std::size_t stride = effective_store_stride(cfg.store_stride, n_t);

  TemperatureField current = initial_field(cfg);
  trace.fields.push_back(current);
  trace.field_levels.push_back(0);
  trace.max_temperature.reserve(n_t + 1);
  trace.max_temperature.push_back(current.max());
  trace.steps.reserve(n_t);

  for (std::size_t k = 0; k < n_t; ++k) {
    TimeStepReport report;
    current = advance(current, cfg, k, report);
    trace.steps.push_back(report);
    trace.max_temperature.push_back(current.max());
    const std::size_t level = k + 1;
    if (level % stride == 0 || level == n_t) {
      trace.fields.push_back(current);
      trace.field_levels.push_back(level);
    }
  }
  return trace;
}

}  // namespace stefan
