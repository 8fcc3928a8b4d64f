#include "stefan/spike.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stefan/solver1d.hpp"

namespace stefan {

bool SpikeConfig::operator==(const SpikeConfig& o) const {
  auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  return grid_r == o.grid_r && grid_t == o.grid_t && material == o.material && source == o.source &&
         scheme == o.scheme && ambient_temp == o.ambient_temp &&
         same(initial_electron_temp, o.initial_electron_temp) &&
         same(initial_lattice_temp, o.initial_lattice_temp) && store_stride == o.store_stride;
}

std::vector<Violation> validate_spike_config(const SpikeConfig& cfg) {
  std::vector<Violation> out;
  const auto& m = cfg.material;
  if (!(cfg.scheme.gamma >= 0.0 && cfg.scheme.gamma <= 1.0))
    out.push_back({"scheme.gamma", "must lie in [0, 1]"});
  if (cfg.grid_r.n_cells() < 3) out.push_back({"grid.n_r", "must be >= 3"});
  if (!(m.density > 0.0)) out.push_back({"spike.density", "must be > 0"});
  if (!(m.coupling >= 0.0)) out.push_back({"spike.coupling", "must be >= 0"});
  if (!(m.lattice_capacity.delta.width > 0.0))
    out.push_back({"lattice.smoothing_width", "must be > 0"});
  if (!(m.lattice_capacity.latent >= 0.0)) out.push_back({"lattice.latent_heat", "must be >= 0"});
  if (!(m.electron_capacity(cfg.ambient_temp) > 0.0))
    out.push_back({"electron.capacity", "C_e must be > 0 at the ambient temperature"});
  if (!(m.lattice_capacity.base > 0.0)) out.push_back({"lattice.capacity", "must be > 0"});
  // Conductivities may vanish (pure-coupling runs) but never go negative.
  if (m.electron_conductivity(cfg.ambient_temp) < 0.0)
    out.push_back({"electron.conductivity", "must be >= 0"});
  if (m.lattice_conductivity(cfg.ambient_temp) < 0.0)
    out.push_back({"lattice.conductivity", "must be >= 0"});
  try {
    validate_source(cfg.source);
  } catch (const std::invalid_argument& e) {
    out.push_back({"source", e.what()});
  }
  return out;
}

TwoTempState initial_state(const SpikeConfig& cfg) {
  TwoTempState s;
  s.radial_grid = cfg.grid_r;
  const std::size_t n = cfg.grid_r.node_count();
  const double te = std::isnan(cfg.initial_electron_temp) ? cfg.ambient_temp : cfg.initial_electron_temp;
  const double ti = std::isnan(cfg.initial_lattice_temp) ? cfg.ambient_temp : cfg.initial_lattice_temp;
  s.temp_e.assign(n, te);
  s.temp_i.assign(n, ti);
  s.temp_e[n - 1] = cfg.ambient_temp;
  s.temp_i[n - 1] = cfg.ambient_temp;
  s.time = 0.0;
  return s;
}

double radial_volume(const Grid1D& grid, std::size_t j) {
  const double h = grid.spacing();
  if (j == 0) return 0.25 * std::numbers::pi * h * h;
  return 2.0 * std::numbers::pi * grid.node(j) * h;
}

double coupling_exchange(double c_e, double c_i, double g, double t_e, double t_i, double h_t) {
  if (g == 0.0) return 0.0;
  const double mu = c_e * c_i / (c_e + c_i);
  const double kappa = g * (1.0 / c_e + 1.0 / c_i);
  return mu * (t_e - t_i) * -std::expm1(-kappa * h_t);
}

namespace {

// Face transmissibility 2 pi r_{j+1/2} K_{j+1/2} / h for faces j = 0..n-2.
std::vector<double> face_transmissibility(const Grid1D& grid, const ConductivityModel& k,
                                          std::span<const double> T) {
  const double h = grid.spacing();
  std::vector<double> out(T.size() - 1);
  for (std::size_t j = 0; j + 1 < T.size(); ++j) {
    const double r_face = (static_cast<double>(j) + 0.5) * h;
    out[j] = 2.0 * std::numbers::pi * r_face * 0.5 * (k(T[j]) + k(T[j + 1])) / h;
  }
  return out;
}

void fill_radial_rows(TridiagonalSystem& sys, const Grid1D& grid, std::span<const double> T,
                      std::span<const double> cap, std::span<const double> trans, double gamma,
                      double h_t, std::span<const double> extra, double boundary_value) {
  const std::size_t n = T.size();
  const std::size_t last = n - 1;
  for (std::size_t j = 0; j < last; ++j) {
    const double vol = radial_volume(grid, j);
    const double a_minus = j > 0 ? trans[j - 1] / vol : 0.0;
    const double a_plus = trans[j] / vol;
    const double lap_old =
        a_plus * (T[j + 1] - T[j]) - (j > 0 ? a_minus * (T[j] - T[j - 1]) : 0.0);
    sys.diag[j] = cap[j] / h_t + gamma * (a_minus + a_plus);
    sys.lower[j] = -gamma * a_minus;
    sys.upper[j] = -gamma * a_plus;
    sys.rhs[j] = cap[j] / h_t * T[j] + (1.0 - gamma) * lap_old + extra[j];
  }
  sys.lower[last] = 0.0;
  sys.upper[last] = 0.0;
  sys.diag[last] = 1.0;
  sys.rhs[last] = boundary_value;
}

}  // namespace

SpikeStepSystems assemble_radial_step(const TwoTempState& state, const SpikeConfig& cfg, std::size_t k) {
  const auto& m = cfg.material;
  const std::size_t n = state.temp_e.size();
  std::vector<double> ce(n), ci(n);
  for (std::size_t j = 0; j < n; ++j) {
    ce[j] = m.density * m.electron_capacity(state.temp_e[j]);
    ci[j] = m.density * m.lattice_capacity(state.temp_i[j]);
  }
  return assemble_radial_step(state, cfg, k, ce, ci);
}

SpikeStepSystems assemble_radial_step(const TwoTempState& state, const SpikeConfig& cfg, std::size_t k,
                                      std::span<const double> cap_e, std::span<const double> cap_i) {
  const auto& m = cfg.material;
  const auto& grid = cfg.grid_r;
  const double h_t = cfg.grid_t.spacing();
  const std::size_t n = grid.node_count();
  if (state.temp_e.size() != n || state.temp_i.size() != n || cap_e.size() != n || cap_i.size() != n)
    throw std::invalid_argument("assemble_radial_step: state does not match the radial grid");
  if (!(h_t > 0.0) || !(grid.spacing() > 0.0))
    throw std::invalid_argument("assemble_radial_step: non-positive step");

  const double t_half = cfg.grid_t.node(k) + 0.5 * h_t;
  SpikeStepSystems out{TridiagonalSystem(n), TridiagonalSystem(n), std::vector<double>(n, 0.0)};

  std::vector<double> extra_e(n, 0.0), extra_i(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double ce = m.density * m.electron_capacity(state.temp_e[j]);
    const double ci = m.density * m.lattice_capacity(state.temp_i[j]);
    const double x = coupling_exchange(ce, ci, m.coupling, state.temp_e[j], state.temp_i[j], h_t);
    out.exchange[j] = x;
    extra_e[j] = source_value(cfg.source, grid.node(j), t_half) - x / h_t;
    extra_i[j] = x / h_t;
  }

  const auto trans_e = face_transmissibility(grid, m.electron_conductivity, state.temp_e);
  const auto trans_i = face_transmissibility(grid, m.lattice_conductivity, state.temp_i);
  fill_radial_rows(out.electron, grid, state.temp_e, cap_e, trans_e, cfg.scheme.gamma, h_t, extra_e,
                   cfg.ambient_temp);
  fill_radial_rows(out.lattice, grid, state.temp_i, cap_i, trans_i, cfg.scheme.gamma, h_t, extra_i,
                   cfg.ambient_temp);
  return out;
}

double SpikeTrace::ledger_relative_error() const {
  if (ledger.empty()) return 0.0;
  const auto& a = ledger.front();
  const auto& b = ledger.back();
  const double stored = (b.electron_enthalpy - a.electron_enthalpy) + (b.lattice_enthalpy - a.lattice_enthalpy);
  const double net = b.source_input - b.boundary_outflow;
  const double scale = b.source_input != 0.0 ? std::abs(b.source_input) : 1.0;
  return std::abs(stored - net) / scale;
}

namespace {

double enthalpy_sum(const Grid1D& grid, const CapacityModel& cap, double density,
                    std::span<const double> T) {
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < T.size(); ++j)
    sum += radial_volume(grid, j) * density * cap.enthalpy(T[j]);
  return sum;
}

constexpr int kPicardSweeps = 8;

// Newton on the volumetric enthalpies u_j = density H(T_j) of one species:
//   (u_j - u_j^k) / h_t - (radial operator and sources)_j = 0.
// sys0 is the step assembled with unit capacities; the Dirichlet row stays fixed.
bool species_newton(const TridiagonalSystem& sys0, std::span<const double> prev, const CapacityModel& cap,
                    double density, double h_t, double tol, std::vector<double>& T, int max_iterations,
                    int& used) {
  const std::size_t n = T.size();
  const std::size_t last = n - 1;
  std::vector<double> u_prev(n), u(n), G(n);
  for (std::size_t j = 0; j < n; ++j) {
    u_prev[j] = density * cap.enthalpy(prev[j]);
    u[j] = density * cap.enthalpy(T[j]);
  }
  auto residual = [&](const std::vector<double>& t, const std::vector<double>& uu, std::vector<double>& g) {
    const auto a = sys0.apply(t);
    double norm = 0.0;
    for (std::size_t j = 0; j < last; ++j) {
      g[j] = (uu[j] - u_prev[j] - (t[j] - prev[j])) / h_t + a[j] - sys0.rhs[j];
      norm = std::max(norm, std::abs(g[j]));
    }
    g[last] = 0.0;
    return norm;
  };
  double norm = residual(T, u, G);

  TridiagonalSystem J(n);
  std::vector<double> un(n), Tn(n), Gn(n);
  for (used = 0; used < max_iterations;) {
    ++used;
    for (std::size_t j = 0; j < n; ++j) {
      const double inv_c = 1.0 / (density * cap(T[j]));
      const bool fixed = j == last;
      J.diag[j] = fixed ? 1.0 : 1.0 / h_t + (sys0.diag[j] - 1.0 / h_t) * inv_c;
      if (j > 0) J.upper[j - 1] = j - 1 == last ? 0.0 : sys0.upper[j - 1] * inv_c;
      if (j + 1 < n) J.lower[j + 1] = j + 1 == last ? 0.0 : sys0.lower[j + 1] * inv_c;
      J.rhs[j] = -G[j];
    }
    J.lower[0] = 0.0;
    J.upper[last] = 0.0;
    const auto delta = thomas_solve(J);

    double step = 1.0, norm_new = norm;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) {
        un[j] = u[j] + step * delta[j];
        Tn[j] = j == last ? T[j] : cap.temperature_from_enthalpy(un[j] / density);
      }
      norm_new = residual(Tn, un, Gn);
      if (norm_new < norm || norm_new == 0.0) break;
    }
    double change = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      change = std::max(change, std::abs(Tn[j] - T[j]));
      scale = std::max(scale, std::abs(Tn[j]));
    }
    T.swap(Tn);
    u.swap(un);
    G.swap(Gn);
    norm = norm_new;
    if (change <= tol * scale) return true;
  }
  return false;
}

// Outward flux through the face next to r_max, gamma-weighted over the step.
double boundary_flux(const Grid1D& grid, const ConductivityModel& k, std::span<const double> old_t,
                     std::span<const double> new_t, double gamma) {
  const std::size_t n = old_t.size();
  const auto trans = face_transmissibility(grid, k, old_t);
  const double f_old = trans[n - 2] * (old_t[n - 2] - old_t[n - 1]);
  const double f_new = trans[n - 2] * (new_t[n - 2] - new_t[n - 1]);
  return gamma * f_new + (1.0 - gamma) * f_old;
}

}  // namespace

SpikeTrace run_spike(const SpikeConfig& cfg) {
  if (auto v = validate_spike_config(cfg); !v.empty()) throw ConfigError(std::move(v));
  const auto& m = cfg.material;
  const auto& grid = cfg.grid_r;
  const std::size_t n = grid.node_count();
  const std::size_t n_t = cfg.grid_t.n_cells();
  const double h_t = cfg.grid_t.spacing();
  const std::size_t stride = effective_store_stride(cfg.store_stride, n_t);

  SpikeTrace trace;
  trace.config = cfg;
  TwoTempState state = initial_state(cfg);
  trace.states.push_back(state);
  trace.state_levels.push_back(0);

  SpikeEnergyRecord rec;
  rec.electron_enthalpy = enthalpy_sum(grid, m.electron_capacity, m.density, state.temp_e);
  rec.lattice_enthalpy = enthalpy_sum(grid, m.lattice_capacity, m.density, state.temp_i);
  trace.ledger.push_back(rec);

  std::vector<double> ce(n), ci(n);
  for (std::size_t k = 0; k < n_t; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      ce[j] = m.density * m.electron_capacity(state.temp_e[j]);
      ci[j] = m.density * m.lattice_capacity(state.temp_i[j]);
    }
    auto sys = assemble_radial_step(state, cfg, k, ce, ci);
    auto te = thomas_solve(sys.electron);
    auto ti = thomas_solve(sys.lattice);

    if (cfg.scheme.capacity == CapacityTreatment::kChord) {
      bool converged = false;
      const int picard_limit = std::min(cfg.scheme.max_iterations, kPicardSweeps);
      int it = 1;
      for (; it < picard_limit; ++it) {
        for (std::size_t j = 0; j < n; ++j) {
          ce[j] = m.density * m.electron_capacity.chord(state.temp_e[j], te[j]);
          ci[j] = m.density * m.lattice_capacity.chord(state.temp_i[j], ti[j]);
        }
        auto next = assemble_radial_step(state, cfg, k, ce, ci);
        auto te2 = thomas_solve(next.electron);
        auto ti2 = thomas_solve(next.lattice);
        double change = 0.0, scale = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
          change = std::max({change, std::abs(te2[j] - te[j]), std::abs(ti2[j] - ti[j])});
          scale = std::max({scale, std::abs(te2[j]), std::abs(ti2[j])});
        }
        te = std::move(te2);
        ti = std::move(ti2);
        sys = std::move(next);
        if (change <= cfg.scheme.iteration_tolerance * scale) {
          converged = true;
          break;
        }
      }
      if (!converged && it < cfg.scheme.max_iterations) {
        const std::vector<double> ones(n, 1.0);
        const auto sys0 = assemble_radial_step(state, cfg, k, ones, ones);
        const int budget = cfg.scheme.max_iterations - it;
        int used_e = 0, used_i = 0;
        const bool ok_e = species_newton(sys0.electron, state.temp_e, m.electron_capacity, m.density, h_t,
                                         cfg.scheme.iteration_tolerance, te, budget, used_e);
        const bool ok_i = species_newton(sys0.lattice, state.temp_i, m.lattice_capacity, m.density, h_t,
                                         cfg.scheme.iteration_tolerance, ti, budget, used_i);
        converged = ok_e && ok_i;
        sys.exchange = sys0.exchange;
      }
      if (!converged) ++trace.unconverged_steps;
    }

    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(te[j]) || !std::isfinite(ti[j]))
        throw SolverError(k, "run_spike: non-finite temperature at node " + std::to_string(j) +
                                 " in step " + std::to_string(k));
    }

    const double t_half = cfg.grid_t.node(k) + 0.5 * h_t;
    double src = 0.0, transfer = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double vol = radial_volume(grid, j);
      src += vol * h_t * source_value(cfg.source, grid.node(j), t_half);
      transfer += vol * sys.exchange[j];
    }
    const double outflow = h_t * (boundary_flux(grid, m.electron_conductivity, state.temp_e, te, cfg.scheme.gamma) +
                                  boundary_flux(grid, m.lattice_conductivity, state.temp_i, ti, cfg.scheme.gamma));

    state.temp_e = std::move(te);
    state.temp_i = std::move(ti);
    state.time = cfg.grid_t.node(k + 1);

    SpikeEnergyRecord r = trace.ledger.back();
    r.time = state.time;
    r.electron_enthalpy = enthalpy_sum(grid, m.electron_capacity, m.density, state.temp_e);
    r.lattice_enthalpy = enthalpy_sum(grid, m.lattice_capacity, m.density, state.temp_i);
    r.coupling_transfer += transfer;
    r.boundary_outflow += outflow;
    r.source_input += src;
    trace.ledger.push_back(r);

    const std::size_t level = k + 1;
    if (level % stride == 0 || level == n_t) {
      trace.states.push_back(state);
      trace.state_levels.push_back(level);
    }
  }
  return trace;
}

}  // namespace stefan
