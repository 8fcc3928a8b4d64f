#include "stefan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "stefan/config_parser.hpp"
#include "stefan/export.hpp"

namespace stefan {

namespace fs = std::filesystem;

double pulse_end(const SourceModel& source) {
  if (std::holds_alternative<NoSource>(source)) return 0.0;
  if (const auto* s = std::get_if<LogisticBeamSource>(&source)) return s->t_edge + 5.0 / s->steepness_t;
  if (const auto* s = std::get_if<GaussianPulseSource>(&source)) return s->t_peak + 3.0 * s->duration;
  return std::numeric_limits<double>::infinity();
}

std::optional<double> relaxation_time(const StefanResidualTrace& res, double early_limit, double drop) {
  std::size_t peak = res.times.size();
  double peak_value = 0.0;
  for (std::size_t i = 0; i < res.times.size() && res.times[i] <= early_limit; ++i) {
    if (!res.defined[i]) continue;
    if (std::abs(res.phi[i]) > peak_value) {
      peak_value = std::abs(res.phi[i]);
      peak = i;
    }
  }
  if (peak == res.times.size() || peak_value == 0.0) return std::nullopt;
  for (std::size_t i = peak + 1; i < res.times.size(); ++i)
    if (res.defined[i] && std::abs(res.phi[i]) < drop * peak_value) return res.times[i];
  return std::nullopt;
}

std::optional<double> decline_onset(const std::vector<double>& times, const std::vector<double>& thickness) {
  if (thickness.size() < 3) return std::nullopt;
  const auto it = std::max_element(thickness.begin(), thickness.end());
  const auto k = static_cast<std::size_t>(it - thickness.begin());
  if (*it <= 0.0 || k + 1 >= thickness.size()) return std::nullopt;
  if (!(thickness.back() < *it)) return std::nullopt;
  return times[k];
}

CartesianResult analyse_cartesian(SimulationTrace trace, const ExperimentSpec& spec) {
  CartesianResult r;
  const auto& cfg = trace.config;
  const auto& mat = cfg.material;
  const auto& a = spec.analysis;
  r.trace = std::move(trace);
  const std::span<const TemperatureField> fields(r.trace.fields);

  r.fronts = track_fronts(fields, mat.transition_temp, a.max_jump_cells);
  r.residual = stefan_residual(fields, mat, a.probe_offset, a.max_jump_cells);
  r.tableland.reserve(fields.size());
  for (const auto& f : fields) r.tableland.push_back(tableland_metrics(f, mat, a.tableland_min_cells));
  r.instability = delta_instability_sweep(fields, mat.transition_temp, a.instability_epsilon * mat.transition_temp,
                                          a.instability_threshold);
  r.thickness = melt_thickness(r.fronts);
  r.pulse_end = pulse_end(cfg.source);
  double early = cfg.grid_t.length();
  if (const auto* s = std::get_if<LogisticBeamSource>(&cfg.source)) early = std::min(early, s->t_edge);
  r.relaxation_time = relaxation_time(r.residual, early, a.residual_drop);
  r.thickness_peak_time = decline_onset(r.fronts.times, r.thickness);
  r.deposited_energy = deposited_energy(cfg.source, {0.0, cfg.grid_x.length()}, {0.0, cfg.grid_t.length()});
  return r;
}

CartesianResult run_cartesian(const ExperimentSpec& spec) {
  return analyse_cartesian(run_simulation(spec.simulation), spec);
}

InstabilityContrast instability_contrast(const CartesianResult& r) {
  InstabilityContrast c;
  std::vector<double> slow;
  const auto& s = r.instability.sensitivity;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i])) continue;
    if (r.tableland[i].extended) {
      c.tableland_max = std::max(c.tableland_max, s[i]);
      ++c.tableland_samples;
    } else if (r.relaxation_time && r.instability.times[i] >= *r.relaxation_time &&
               (!r.thickness_peak_time || r.instability.times[i] <= *r.thickness_peak_time)) {
      slow.push_back(s[i]);
    }
  }
  c.slow_samples = slow.size();
  if (slow.empty()) {
    c.slow_median = std::nan("");
    c.ratio = std::nan("");
    return c;
  }
  const auto mid = slow.begin() + static_cast<std::ptrdiff_t>(slow.size() / 2);
  std::nth_element(slow.begin(), mid, slow.end());
  c.slow_median = *mid;
  if (slow.size() % 2 == 0) {
    const double lower = *std::max_element(slow.begin(), mid);
    c.slow_median = 0.5 * (c.slow_median + lower);
  }
  c.ratio = c.slow_median > 0.0 ? c.tableland_max / c.slow_median : std::numeric_limits<double>::infinity();
  return c;
}

LumpedResult run_lumped(const ExperimentSpec& spec) {
  const auto& l = spec.lumped;
  LumpedResult r;
  const auto q = l.source.function();
  r.trace = solve_lumped(l.material, q, l.t_max, l.n_steps, l.options);
  if (r.trace.has_plateau()) r.bound = check_transition_bound(r.trace, l.material, q);
  return r;
}

SpikeResult run_spike_experiment(const ExperimentSpec& spec) {
  SpikeResult r;
  r.trace = run_spike(spec.spike);
  const auto& cap = spec.spike.material.lattice_capacity;
  std::vector<TemperatureField> lattice;
  lattice.reserve(r.trace.states.size());
  for (const auto& s : r.trace.states) {
    lattice.push_back(s.lattice_field());
    r.tableland.push_back(
        tableland_metrics(lattice.back(), cap.delta.center, cap.delta.width, spec.analysis.tableland_min_cells));
  }
  r.lattice_fronts = track_fronts(lattice, cap.delta.center, spec.analysis.max_jump_cells);
  return r;
}

namespace {

bool analytic_applicable(const SimulationConfig& c) {
  return c.initial_mode_amplitude != 0.0 && std::holds_alternative<NoSource>(c.source) &&
         c.material.latent_heat == 0.0 && c.material.conductivity.slope == 0.0;
}

}  // namespace

ConvergenceResult run_convergence(const ExperimentSpec& spec, std::optional<std::size_t> levels) {
  const auto& base = spec.simulation;
  const std::size_t n = levels.value_or(spec.convergence.levels);
  const std::size_t refine = spec.convergence.refine;
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  std::size_t nx = base.grid_x.n_cells(), nt = base.grid_t.n_cells();
  for (std::size_t i = 0; i < n; ++i) {
    grid.push_back({nx, nt});
    nx *= refine;
    nt *= refine;
  }
  auto reference = spec.convergence.reference;
  if (spec.kind != ExperimentKind::kConvergence)
    reference = analytic_applicable(base) ? ConvergenceReference::kAnalytic : ConvergenceReference::kFineGrid;
  if (reference == ConvergenceReference::kAnalytic) {
    if (!analytic_applicable(base))
      throw std::invalid_argument(
          "analytic reference needs a cosine initial mode, no source, no latent heat and constant conductivity");
    return convergence_study(base, grid, neumann_cosine_mode(base));
  }
  return convergence_study(base, grid, refine);
}

std::vector<CheckItem> run_checks(const ExperimentSpec& spec) {
  std::vector<CheckItem> items;
  auto add = [&](std::string name, bool ok, std::string detail) {
    items.push_back({std::move(name), ok, std::move(detail)});
  };
  switch (spec.kind) {
    case ExperimentKind::kCartesian1D:
    case ExperimentKind::kInstabilitySweep: {
      const auto r = run_cartesian(spec);
      bool finite = true;
      for (double v : r.trace.max_temperature) finite = finite && std::isfinite(v);
      add("bounded", finite, "max temperature finite at every level");
      const double e_in = r.trace.total_energy_in();
      if (e_in > 0.0) {
        const double err = r.trace.ledger_relative_error();
        add("energy_ledger", err < 5e-3, "relative error " + format_double(err) + " (limit 0.005)");
        const double q_err = std::abs(e_in - r.deposited_energy) / r.deposited_energy;
        add("deposited_energy", q_err < 1e-2,
            "grid sum vs quadrature relative difference " + format_double(q_err) + " (limit 0.01)");
      } else {
        const double dh = std::abs(r.trace.total_enthalpy_change());
        const double scale = 1.0 + std::abs(field_enthalpy(r.trace.fields.front(), r.trace.config.material));
        add("energy_ledger", dh <= 1e-9 * scale, "enthalpy drift " + format_double(dh) + " without source");
      }
      if (std::isfinite(r.pulse_end) && r.pulse_end > 0.0) {
        const bool ok = r.relaxation_time && *r.relaxation_time < r.pulse_end;
        add("residual_decay", ok,
            "t1 = " + (r.relaxation_time ? format_double(*r.relaxation_time) : std::string("none")) +
                ", pulse end = " + format_double(r.pulse_end));
      }
      break;
    }
    case ExperimentKind::kLumped: {
      const auto r = run_lumped(spec);
      if (!r.bound) {
        add("transition_bound", false, "transition never completes within t_max");
        break;
      }
      add("transition_bound", r.bound->satisfied,
          "delta_t = " + format_double(r.bound->delta_t) + ", latent/Q = " + format_double(r.bound->latent_time) +
              ", tolerance = " + format_double(r.bound->tolerance));
      break;
    }
    case ExperimentKind::kThermalSpike: {
      const auto r = run_spike_experiment(spec);
      const double input = r.trace.ledger.back().source_input;
      const double err = r.trace.ledger_relative_error();
      if (input > 0.0) add("energy_ledger", err < 5e-3, "relative error " + format_double(err) + " (limit 0.005)");
      bool finite = true;
      for (const auto& s : r.trace.states)
        for (std::size_t j = 0; j < s.temp_e.size(); ++j)
          finite = finite && std::isfinite(s.temp_e[j]) && std::isfinite(s.temp_i[j]);
      add("bounded", finite, "temperatures finite at every stored level");
      break;
    }
    case ExperimentKind::kConvergence: {
      const auto r = run_convergence(spec);
      const double expected = spec.simulation.scheme.gamma == 0.5 ? 2.0 : 1.0;
      add("convergence_order", r.order >= expected - 0.2,
          "order " + format_double(r.order) + " (expected >= " + format_double(expected - 0.2) + ")");
      break;
    }
  }
  return items;
}

namespace {

struct RunOutput {
  fs::path dir;
  std::optional<PhaseFrontTrace> fronts;
  double max_sensitivity = std::nan("");
};

fs::path output_dir_for(const ExperimentSpec& spec, const fs::path& root) {
  const fs::path out(spec.output_dir.empty() ? spec.name : spec.output_dir);
  return out.is_absolute() ? out : root / out;
}

std::vector<InstabilityTable> epsilon_tables(const CartesianResult& r, const ExperimentSpec& spec) {
  const double t_star = r.trace.config.material.transition_temp;
  const double eps = spec.analysis.instability_epsilon * t_star;
  const std::vector<double> eps_list{0.25 * eps, 0.5 * eps, eps};
  return delta_instability_sweep(r.trace.fields, t_star, eps_list, spec.analysis.instability_threshold);
}

RunOutput run_and_export(const ExperimentSpec& spec, const fs::path& root) {
  RunOutput out;
  out.dir = output_dir_for(spec, root);
  switch (spec.kind) {
    case ExperimentKind::kCartesian1D:
    case ExperimentKind::kInstabilitySweep: {
      const auto r = run_cartesian(spec);
      export_trace(r, spec, out.dir);
      if (spec.kind == ExperimentKind::kInstabilitySweep) export_instability(r, epsilon_tables(r, spec), out.dir);
      out.fronts = r.fronts;
      double m = 0.0;
      for (double s : r.instability.sensitivity)
        if (std::isfinite(s)) m = std::max(m, s);
      out.max_sensitivity = m;
      break;
    }
    case ExperimentKind::kLumped: export_trace(run_lumped(spec), spec, out.dir); break;
    case ExperimentKind::kThermalSpike: export_trace(run_spike_experiment(spec), spec, out.dir); break;
    case ExperimentKind::kConvergence: export_convergence(run_convergence(spec), spec, out.dir); break;
  }
  return out;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
  return out;
}

}  // namespace

fs::path run_experiment(const ExperimentSpec& spec, const fs::path& output_root) {
  return run_and_export(spec, output_root).dir;
}

std::vector<SweepRun> run_sweep(const ExperimentSpec& spec,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& params,
                                const fs::path& output_root, unsigned threads) {
  if (params.empty()) throw std::invalid_argument("sweep needs at least one --param");
  std::vector<std::map<std::string, std::string>> combos{{}};
  for (const auto& [key, values] : params) {
    if (values.empty()) throw std::invalid_argument("parameter '" + key + "' has no values");
    std::vector<std::map<std::string, std::string>> next;
    for (const auto& c : combos)
      for (const auto& v : values) {
        auto m = c;
        m[key] = v;
        next.push_back(std::move(m));
      }
    combos = std::move(next);
  }

  // Validate every override set before any work starts.
  std::vector<ExperimentSpec> specs;
  std::vector<SweepRun> runs(combos.size());
  const fs::path base_dir = output_dir_for(spec, output_root);
  for (std::size_t i = 0; i < combos.size(); ++i) {
    auto s = apply_overrides(spec, combos[i]);
    std::string id = "run_" + std::string(i < 10 ? "00" : i < 100 ? "0" : "") + std::to_string(i);
    for (const auto& [k, v] : combos[i]) id += "__" + sanitize(k) + "=" + sanitize(v);
    s.output_dir = fs::absolute(base_dir / id).string();
    runs[i].id = id;
    runs[i].overrides = combos[i];
    runs[i].directory = base_dir / id;
    specs.push_back(std::move(s));
  }

  std::vector<std::optional<PhaseFrontTrace>> fronts(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        auto out = run_and_export(specs[i], output_root);
        runs[i].ok = true;
        runs[i].max_sensitivity = out.max_sensitivity;
        fronts[i] = std::move(out.fronts);
        runs[i].final_front = fronts[i] ? fronts[i]->exterior.back() : std::nan("");
      } catch (const std::exception& e) {
        runs[i].ok = false;
        runs[i].error = e.what();
        runs[i].final_front = std::nan("");
        runs[i].max_sensitivity = std::nan("");
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, specs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream summary;
  summary << "run,ok";
  for (const auto& [key, values] : params) summary << ',' << key;
  summary << ",final_front,max_sensitivity,error\n";
  for (const auto& r : runs) {
    summary << r.id << ',' << (r.ok ? 1 : 0);
    for (const auto& [key, values] : params) summary << ',' << r.overrides.at(key);
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    summary << ',' << format_double(r.final_front) << ',' << format_double(r.max_sensitivity) << ',' << err << '\n';
  }
  write_file_atomic(base_dir / "sweep_summary.csv", summary.str());

  // Exterior fronts side by side when every run stored the same times.
  bool aligned = !fronts.empty();
  for (const auto& f : fronts) aligned = aligned && f && f->times == fronts.front()->times;
  if (aligned) {
    std::ostringstream os;
    os << "time";
    for (const auto& r : runs) os << ',' << r.id;
    os << '\n';
    const auto& times = fronts.front()->times;
    for (std::size_t k = 0; k < times.size(); ++k) {
      os << format_double(times[k]);
      for (const auto& f : fronts) os << ',' << format_double(f->exterior[k]);
      os << '\n';
    }
    write_file_atomic(base_dir / "sweep_fronts.csv", os.str());
  }
  return runs;
}

fs::path default_output_root() {
  if (const char* env = std::getenv("STEFAN_OUTPUT_ROOT"); env && *env) return env;
  return "output";
}

fs::path default_spec_dir() {
  if (const char* env = std::getenv("STEFAN_SPEC_DIR"); env && *env) return env;
#ifdef STEFAN_SPEC_DIR
  return STEFAN_SPEC_DIR;
#else
  return "specs";
#endif
}

fs::path resolve_spec(const std::string& name, const fs::path& spec_dir) {
  std::error_code ec;
  if (fs::is_regular_file(name, ec)) return name;
  const fs::path direct = spec_dir / (name + ".ini");
  if (fs::is_regular_file(direct, ec)) return direct;
  std::vector<fs::path> matches;
  if (fs::is_directory(spec_dir, ec)) {
    for (const auto& entry : fs::directory_iterator(spec_dir, ec)) {
      if (entry.path().extension() != ".ini") continue;
      const auto stem = entry.path().stem().string();
      if (stem.rfind(name, 0) == 0) matches.push_back(entry.path());
    }
  }
  std::sort(matches.begin(), matches.end());
  if (matches.size() == 1) return matches.front();
  if (matches.empty()) throw std::runtime_error("no spec named '" + name + "' in " + spec_dir.string());
  std::string list;
  for (const auto& m : matches) list += " " + m.stem().string();
  throw std::runtime_error("ambiguous spec name '" + name + "':" + list);
}

}  // namespace stefan
