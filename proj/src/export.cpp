#include "stefan/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "stefan/config_parser.hpp"

namespace stefan {

namespace fs = std::filesystem;

ExportError::ExportError(fs::path path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(std::move(path)) {}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw ExportError(path, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ExportError(path, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ExportError(path, "write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ExportError(path, "rename failed");
  }
}

namespace {

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }
  Csv& operator<<(double v) { return cell(format_double(v)); }
  Csv& operator<<(std::size_t v) { return cell(std::to_string(v)); }
  Csv& operator<<(int v) { return cell(std::to_string(v)); }
  Csv& operator<<(bool v) { return cell(v ? "1" : "0"); }
  Csv& operator<<(const std::string& v) { return cell(v); }
  void end() {
    os_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  Csv& cell(const std::string& s) {
    if (!fresh_) os_ << ',';
    os_ << s;
    fresh_ = false;
    return *this;
  }
  std::ostringstream os_;
  bool fresh_ = true;
};

std::string join_positions(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += format_double(xs[i]);
  }
  return out;
}

std::string summary_csv(const std::vector<std::pair<std::string, double>>& rows) {
  Csv csv{"quantity", "value"};
  for (const auto& [k, v] : rows) {
    csv << k << v;
    csv.end();
  }
  return csv.str();
}

double opt(const std::optional<double>& v) { return v ? *v : std::nan(""); }

}  // namespace

std::string fields_csv(const SimulationTrace& trace) {
  Csv csv{"time", "x", "T"};
  for (const auto& f : trace.fields) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      csv << f.time() << f.grid().node(j) << f[j];
      csv.end();
    }
  }
  return csv.str();
}

std::string fronts_csv(const PhaseFrontTrace& fronts) {
  Csv csv{"time", "count", "exterior", "velocity", "unstable", "positions"};
  for (std::size_t i = 0; i < fronts.times.size(); ++i) {
    csv << fronts.times[i] << fronts.fronts[i].size() << fronts.exterior[i] << fronts.velocities[i]
        << static_cast<bool>(fronts.unstable[i]) << join_positions(fronts.fronts[i]);
    csv.end();
  }
  return csv.str();
}

std::string scalars_csv(const CartesianResult& r) {
  Csv csv{"time",           "phi",         "phi_defined",    "tableland_width",     "tableland_cells",
          "melt_thickness", "sensitivity", "energy_in_cum",  "enthalpy_change_cum", "ledger_residual"};
  const auto& tr = r.trace;
  std::size_t step = 0;
  double e_in = 0.0, d_h = 0.0;
  for (std::size_t i = 0; i < tr.fields.size(); ++i) {
    for (; step < tr.field_levels[i] && step < tr.steps.size(); ++step) {
      e_in += tr.steps[step].energy_in;
      d_h += tr.steps[step].enthalpy_change;
    }
    csv << tr.fields[i].time() << r.residual.phi[i] << static_cast<bool>(r.residual.defined[i])
        << r.tableland[i].width << r.tableland[i].cells << r.thickness[i] << r.instability.sensitivity[i] << e_in
        << d_h << (d_h - e_in);
    csv.end();
  }
  return csv.str();
}

void export_trace(const CartesianResult& r, const ExperimentSpec& spec, const fs::path& dir) {
  write_file_atomic(dir / "fields.csv", fields_csv(r.trace));
  write_file_atomic(dir / "fronts.csv", fronts_csv(r.fronts));
  write_file_atomic(dir / "scalars.csv", scalars_csv(r));
  const auto contrast = instability_contrast(r);
  write_file_atomic(dir / "summary.csv",
                    summary_csv({{"energy_in", r.trace.total_energy_in()},
                                 {"deposited_energy_quadrature", r.deposited_energy},
                                 {"enthalpy_change", r.trace.total_enthalpy_change()},
                                 {"ledger_relative_error", r.trace.ledger_relative_error()},
                                 {"unconverged_steps", static_cast<double>(r.trace.unconverged_steps())},
                                 {"max_temperature", r.trace.fields.empty() ? 0.0 : [&] {
                                    double m = -INFINITY;
                                    for (double v : r.trace.max_temperature) m = std::max(m, v);
                                    return m;
                                  }()},
                                 {"pulse_end", r.pulse_end},
                                 {"relaxation_time", opt(r.relaxation_time)},
                                 {"thickness_peak_time", opt(r.thickness_peak_time)},
                                 {"sensitivity_tableland_max", contrast.tableland_max},
                                 {"sensitivity_slow_median", contrast.slow_median},
                                 {"sensitivity_ratio", contrast.ratio}}));
  write_file_atomic(dir / "meta.ini", emit_config(spec));
}

void export_trace(const LumpedResult& r, const ExperimentSpec& spec, const fs::path& dir) {
  Csv csv{"time", "T", "H"};
  for (std::size_t i = 0; i < r.trace.times.size(); ++i) {
    csv << r.trace.times[i] << r.trace.temps[i] << r.trace.enthalpy[i];
    csv.end();
  }
  write_file_atomic(dir / "fields.csv", csv.str());
  std::vector<std::pair<std::string, double>> rows{{"plateau_start", opt(r.trace.plateau_start)},
                                                   {"plateau_end", opt(r.trace.plateau_end)},
                                                   {"delta_t", r.trace.delta_t()}};
  if (r.bound) {
    rows.push_back({"max_power", r.bound->max_power});
    rows.push_back({"latent_time", r.bound->latent_time});
    rows.push_back({"tolerance", r.bound->tolerance});
    rows.push_back({"bound_satisfied", r.bound->satisfied ? 1.0 : 0.0});
  }
  write_file_atomic(dir / "scalars.csv", summary_csv(rows));
  write_file_atomic(dir / "meta.ini", emit_config(spec));
}

void export_trace(const SpikeResult& r, const ExperimentSpec& spec, const fs::path& dir) {
  const auto& tr = r.trace;
  Csv fields{"time", "r", "T_e", "T_i"};
  for (const auto& s : tr.states) {
    for (std::size_t j = 0; j < s.temp_e.size(); ++j) {
      fields << s.time << s.radial_grid.node(j) << s.temp_e[j] << s.temp_i[j];
      fields.end();
    }
  }
  write_file_atomic(dir / "fields.csv", fields.str());
  write_file_atomic(dir / "fronts.csv", fronts_csv(r.lattice_fronts));

  Csv scalars{"time",           "tableland_width",   "tableland_cells",  "electron_enthalpy",
              "lattice_enthalpy", "coupling_transfer", "boundary_outflow", "source_input"};
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const auto& e = tr.ledger[tr.state_levels[i]];
    scalars << tr.states[i].time << r.tableland[i].width << r.tableland[i].cells << e.electron_enthalpy
            << e.lattice_enthalpy << e.coupling_transfer << e.boundary_outflow << e.source_input;
    scalars.end();
  }
  write_file_atomic(dir / "scalars.csv", scalars.str());
  write_file_atomic(dir / "summary.csv",
                    summary_csv({{"ledger_relative_error", tr.ledger_relative_error()},
                                 {"unconverged_steps", static_cast<double>(tr.unconverged_steps)},
                                 {"relaxation_time", tr.config.material.relaxation_time()}}));
  write_file_atomic(dir / "meta.ini", emit_config(spec));
}

void export_convergence(const ConvergenceResult& r, const ExperimentSpec& spec, const fs::path& dir) {
  Csv csv{"n_x", "n_t", "h_x", "h_t", "error"};
  for (const auto& l : r.levels) {
    csv << l.n_x << l.n_t << l.h_x << l.h_t << l.error;
    csv.end();
  }
  write_file_atomic(dir / "convergence.csv", csv.str());
  write_file_atomic(dir / "summary.csv", summary_csv({{"order", r.order}}));
  write_file_atomic(dir / "meta.ini", emit_config(spec));
}

void export_instability(const CartesianResult& r, const std::vector<InstabilityTable>& tables,
                        const fs::path& dir) {
  std::ostringstream os;
  os << "time,front";
  for (const auto& t : tables) {
    const auto e = format_double(t.epsilon);
    os << ",shift_" << e << ",sensitivity_" << e << ",flagged_" << e;
  }
  os << '\n';
  for (std::size_t i = 0; i < r.fronts.times.size(); ++i) {
    os << format_double(r.fronts.times[i]) << ',' << format_double(r.fronts.exterior[i]);
    for (const auto& t : tables)
      os << ',' << format_double(t.shift[i]) << ',' << format_double(t.sensitivity[i]) << ','
         << (t.flagged[i] ? 1 : 0);
    os << '\n';
  }
  write_file_atomic(dir / "instability.csv", os.str());
}

}  // namespace stefan
