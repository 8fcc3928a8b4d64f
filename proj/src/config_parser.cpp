#include "stefan/config_parser.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>

namespace stefan {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

SchemaError::SchemaError(std::string key, const std::string& message)
    : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kCartesian1D: return "cartesian-1d";
    case ExperimentKind::kLumped: return "lumped";
    case ExperimentKind::kThermalSpike: return "thermal-spike";
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kInstabilitySweep: return "instability-sweep";
  }
  return "cartesian-1d";
}

TimeFunction TimeSourceSpec::function() const {
  const TimeSourceSpec s = *this;
  switch (s.kind) {
    case TimeSourceKind::kConstant: return [s](double) { return s.value; };
    case TimeSourceKind::kRamp: return [s](double t) { return s.value + s.slope * t; };
    case TimeSourceKind::kLogistic:
      return [s](double t) { return s.amplitude * logistic_step(t, s.t_edge, s.steepness); };
  }
  return [](double) { return 0.0; };
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

}  // namespace

ConfigDocument parse_document(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // Strip comments: '#' or ';' at line start or after whitespace.
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if ((raw[i] == '#' || raw[i] == ';') && (i == 0 || raw[i - 1] == ' ' || raw[i - 1] == '\t')) {
        cut = i;
        break;
      }
    }
    const std::string_view body = raw.substr(0, cut);
    const std::string_view line = trim(body);
    if (line.empty()) continue;
    const int indent = static_cast<int>(body.find_first_not_of(" \t")) + 1;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(line_no, indent + static_cast<int>(line.size()) - 1, "expected ']' to close section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_identifier(name)) throw ParseError(line_no, indent + 1, "invalid section name");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line_no, indent + static_cast<int>(line.size()), "expected '=' after key");
    const auto key = trim(line.substr(0, eq));
    if (!valid_identifier(key)) throw ParseError(line_no, indent, "invalid key");
    auto value = trim(line.substr(eq + 1));
    const int value_col = indent + static_cast<int>(eq) + 1 +
                          static_cast<int>(line.substr(eq + 1).find_first_not_of(" \t") == std::string_view::npos
                                               ? 0
                                               : line.substr(eq + 1).find_first_not_of(" \t"));
    if (value.size() >= 2 && value.front() == '"') {
      if (value.back() != '"') throw ParseError(line_no, value_col, "unterminated string");
      value = value.substr(1, value.size() - 2);
    } else if (!value.empty() && value.front() == '"') {
      throw ParseError(line_no, value_col, "unterminated string");
    }
    if (value.empty()) throw ParseError(line_no, value_col, "missing value");
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.entries.count(full)) throw ParseError(line_no, indent, "duplicate key '" + full + "'");
    doc.entries[full] = {std::string(value), line_no, value_col};
    doc.order.push_back(full);
  }
  return doc;
}

namespace {

class Binder {
 public:
  explicit Binder(const ConfigDocument& doc) : doc_(doc) {}

  const ConfigDocument::Entry* find(const std::string& key) {
    auto it = doc_.entries.find(key);
    if (it == doc_.entries.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  void number(const std::string& key, double& out) {
    const auto* e = find(key);
    if (!e) return;
    double v = 0.0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last || !std::isfinite(v))
      throw SchemaError(key, "expected a number, got \"" + e->value + "\"");
    out = v;
  }

  void count(const std::string& key, std::size_t& out) {
    const auto* e = find(key);
    if (!e) return;
    std::size_t v = 0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
      throw SchemaError(key, "expected a non-negative integer, got \"" + e->value + "\"");
    out = v;
  }

  void integer(const std::string& key, int& out) {
    const auto* e = find(key);
    if (!e) return;
    int v = 0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw SchemaError(key, "expected an integer, got \"" + e->value + "\"");
    out = v;
  }

  void text(const std::string& key, std::string& out) {
    if (const auto* e = find(key)) out = e->value;
  }

  template <class E>
  void choice(const std::string& key, E& out, std::initializer_list<std::pair<const char*, E>> options) {
    const auto* e = find(key);
    if (!e) return;
    std::string allowed;
    for (const auto& [name, value] : options) {
      if (e->value == name) {
        out = value;
        return;
      }
      allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw SchemaError(key, "expected one of {" + allowed + "}, got \"" + e->value + "\"");
  }

  bool has(const std::string& key) const { return doc_.entries.count(key) > 0; }

  void finish() const {
    for (const auto& key : doc_.order)
      if (!used_.count(key)) throw SchemaError(key, "unknown key");
  }

 private:
  const ConfigDocument& doc_;
  std::set<std::string> used_;
};

Grid1D make_grid(const std::string& key, std::size_t n, double length) {
  if (n == 0) throw SchemaError(key, "must be a positive integer");
  if (!(length > 0.0)) throw SchemaError(key, "extent must be > 0");
  return Grid1D(n, length);
}

void bind_scheme(Binder& b, SchemeSettings& s) {
  b.number("scheme.gamma", s.gamma);
  b.choice("scheme.capacity", s.capacity,
           {{"lagged", CapacityTreatment::kLagged}, {"chord", CapacityTreatment::kChord}});
  b.integer("scheme.max_iterations", s.max_iterations);
  b.number("scheme.tolerance", s.iteration_tolerance);
}

void bind_material(Binder& b, MaterialModel& m) {
  b.number("material.base_capacity", m.base_capacity);
  b.number("material.conductivity", m.conductivity.reference);
  b.number("material.conductivity_slope", m.conductivity.slope);
  b.number("material.latent_heat", m.latent_heat);
  b.number("material.transition_temp", m.transition_temp);
  b.number("material.smoothing_width", m.smoothing_width);
}

void bind_scales(Binder& b, ScaleSet& s) {
  b.number("scales.T0", s.T0);
  b.number("scales.l0", s.l0);
  b.number("scales.tau", s.tau);
  if (!s.valid()) throw SchemaError("scales", "T0, l0 and tau must be > 0");
}

void bind_cartesian(Binder& b, ExperimentSpec& spec) {
  auto& cfg = spec.simulation;
  std::size_t n_x = cfg.grid_x.n_cells(), n_t = cfg.grid_t.n_cells();
  double length = cfg.grid_x.length(), t_max = cfg.grid_t.length();
  b.count("grid.n_x", n_x);
  b.number("grid.length", length);
  b.count("grid.n_t", n_t);
  b.number("grid.t_max", t_max);
  b.count("grid.store_stride", cfg.store_stride);
  cfg.grid_x = make_grid("grid.n_x", n_x, length);
  cfg.grid_t = make_grid("grid.n_t", n_t, t_max);

  bind_material(b, cfg.material);

  std::string type = "none";
  b.text("source.type", type);
  if (type == "none") {
    cfg.source = NoSource{};
  } else if (type == "logistic") {
    LogisticBeamSource s;
    b.number("source.amplitude", s.amplitude);
    b.number("source.x_edge", s.x_edge);
    b.number("source.t_edge", s.t_edge);
    b.number("source.steepness_x", s.steepness_x);
    b.number("source.steepness_t", s.steepness_t);
    cfg.source = s;
  } else {
    throw SchemaError("source.type", "expected one of {none, logistic}, got \"" + type + "\"");
  }

  bind_scheme(b, cfg.scheme);
  b.number("initial.temperature", cfg.initial_temp);
  b.number("initial.mode_amplitude", cfg.initial_mode_amplitude);

  auto& a = spec.analysis;
  b.number("analysis.probe_offset", a.probe_offset);
  b.number("analysis.max_jump_cells", a.max_jump_cells);
  b.count("analysis.tableland_min_cells", a.tableland_min_cells);
  b.number("analysis.instability_epsilon", a.instability_epsilon);
  b.number("analysis.instability_threshold", a.instability_threshold);
  b.number("analysis.residual_drop", a.residual_drop);

  if (spec.kind == ExperimentKind::kConvergence) {
    auto& c = spec.convergence;
    b.count("convergence.levels", c.levels);
    b.count("convergence.refine", c.refine);
    b.choice("convergence.reference", c.reference,
             {{"analytic", ConvergenceReference::kAnalytic}, {"fine", ConvergenceReference::kFineGrid}});
    if (c.levels < 3) throw SchemaError("convergence.levels", "must be >= 3");
    if (c.refine < 2) throw SchemaError("convergence.refine", "must be >= 2");
  }

  if (auto v = validate_config(cfg); !v.empty()) {
    std::string msg = v.front().rule;
    for (std::size_t i = 1; i < v.size(); ++i) msg += "; " + v[i].field + ": " + v[i].rule;
    throw SchemaError(v.front().field, msg);
  }
}

void bind_lumped(Binder& b, ExperimentSpec& spec) {
  auto& l = spec.lumped;
  bind_material(b, l.material);
  b.number("lumped.t_max", l.t_max);
  b.count("lumped.n_steps", l.n_steps);
  b.number("lumped.initial_temp", l.options.initial_temp);
  b.number("lumped.plateau_band", l.options.plateau_band);
  b.choice("source.type", l.source.kind,
           {{"constant", TimeSourceKind::kConstant}, {"ramp", TimeSourceKind::kRamp},
            {"logistic", TimeSourceKind::kLogistic}});
  b.number("source.value", l.source.value);
  b.number("source.slope", l.source.slope);
  b.number("source.amplitude", l.source.amplitude);
  b.number("source.t_edge", l.source.t_edge);
  b.number("source.steepness_t", l.source.steepness);
  bind_scales(b, spec.scales);

  if (!(l.t_max > 0.0)) throw SchemaError("lumped.t_max", "must be > 0");
  if (l.n_steps == 0) throw SchemaError("lumped.n_steps", "must be > 0");
  if (!(l.material.smoothing_width > 0.0)) throw SchemaError("material.smoothing_width", "must be > 0");
  if (!(l.material.latent_heat >= 0.0)) throw SchemaError("material.latent_heat", "must be >= 0");
  if (!(l.material.base_capacity > 0.0)) throw SchemaError("material.base_capacity", "must be > 0");
  if (!(l.options.plateau_band > 0.0)) throw SchemaError("lumped.plateau_band", "must be > 0");
  if (!(l.options.initial_temp < l.material.transition_temp))
    throw SchemaError("lumped.initial_temp", "must be below material.transition_temp");
}

void bind_capacity(Binder& b, const std::string& section, CapacityModel& c, bool latent) {
  b.number(section + ".capacity", c.base);
  b.number(section + ".capacity_slope", c.slope);
  if (latent) {
    b.number(section + ".latent_heat", c.latent);
    b.number(section + ".transition_temp", c.delta.center);
    b.number(section + ".smoothing_width", c.delta.width);
  }
}

void bind_spike(Binder& b, ExperimentSpec& spec) {
  auto& cfg = spec.spike;
  auto& m = cfg.material;
  std::size_t n_r = cfg.grid_r.n_cells(), n_t = cfg.grid_t.n_cells();
  double r_max = cfg.grid_r.length(), t_max = cfg.grid_t.length();
  b.count("grid.n_r", n_r);
  b.number("grid.r_max", r_max);
  b.count("grid.n_t", n_t);
  b.number("grid.t_max", t_max);
  b.count("grid.store_stride", cfg.store_stride);
  cfg.grid_r = make_grid("grid.n_r", n_r, r_max);
  cfg.grid_t = make_grid("grid.n_t", n_t, t_max);

  bind_capacity(b, "electron", m.electron_capacity, false);
  b.number("electron.conductivity", m.electron_conductivity.reference);
  b.number("electron.conductivity_slope", m.electron_conductivity.slope);
  b.number("electron.initial_temp", cfg.initial_electron_temp);
  bind_capacity(b, "lattice", m.lattice_capacity, true);
  b.number("lattice.conductivity", m.lattice_conductivity.reference);
  b.number("lattice.conductivity_slope", m.lattice_conductivity.slope);
  b.number("lattice.initial_temp", cfg.initial_lattice_temp);

  b.number("spike.density", m.density);
  b.number("spike.coupling", m.coupling);
  b.number("spike.ambient_temp", cfg.ambient_temp);

  std::string type = "none";
  b.text("source.type", type);
  if (type == "none") {
    cfg.source = NoSource{};
  } else if (type == "gaussian") {
    GaussianPulseSource s;
    b.number("source.energy", s.energy);
    b.number("source.radius", s.radius);
    b.number("source.duration", s.duration);
    b.number("source.t_peak", s.t_peak);
    cfg.source = s;
  } else {
    throw SchemaError("source.type", "expected one of {none, gaussian}, got \"" + type + "\"");
  }
  bind_scheme(b, cfg.scheme);
  b.count("analysis.tableland_min_cells", spec.analysis.tableland_min_cells);
  bind_scales(b, spec.scales);

  if (auto v = validate_spike_config(cfg); !v.empty()) throw SchemaError(v.front().field, v.front().rule);
}

bool filesystem_safe(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

}  // namespace

ExperimentSpec parse_config(std::string_view text) {
  const auto doc = parse_document(text);
  Binder b(doc);
  ExperimentSpec spec;

  if (!b.has("kind")) throw SchemaError("kind", "kind missing");
  b.choice("kind", spec.kind,
           {{"cartesian-1d", ExperimentKind::kCartesian1D}, {"lumped", ExperimentKind::kLumped},
            {"thermal-spike", ExperimentKind::kThermalSpike}, {"convergence", ExperimentKind::kConvergence},
            {"instability-sweep", ExperimentKind::kInstabilitySweep}});
  if (!b.has("name")) throw SchemaError("name", "name missing");
  b.text("name", spec.name);
  if (!filesystem_safe(spec.name)) throw SchemaError("name", "must be non-empty and use only [A-Za-z0-9_.-]");
  b.text("output_dir", spec.output_dir);
  if (spec.output_dir.empty()) spec.output_dir = spec.name;

  switch (spec.kind) {
    case ExperimentKind::kCartesian1D:
    case ExperimentKind::kConvergence:
    case ExperimentKind::kInstabilitySweep:
      bind_cartesian(b, spec);
      bind_scales(b, spec.scales);
      break;
    case ExperimentKind::kLumped: bind_lumped(b, spec); break;
    case ExperimentKind::kThermalSpike: bind_spike(b, spec); break;
  }
  b.finish();
  return spec;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

class Writer {
 public:
  void top(const std::string& key, const std::string& value) { os_ << key << " = " << value << "\n"; }
  void section(const std::string& name) { os_ << "\n[" << name << "]\n"; }
  void kv(const std::string& key, double v) { os_ << key << " = " << fmt(v) << "\n"; }
  void kv(const std::string& key, std::size_t v) { os_ << key << " = " << v << "\n"; }
  void kv(const std::string& key, int v) { os_ << key << " = " << v << "\n"; }
  void kv(const std::string& key, const char* v) { os_ << key << " = " << v << "\n"; }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

void emit_scheme(Writer& w, const SchemeSettings& s) {
  w.section("scheme");
  w.kv("gamma", s.gamma);
  w.kv("capacity", to_string(s.capacity));
  w.kv("max_iterations", s.max_iterations);
  w.kv("tolerance", s.iteration_tolerance);
}

void emit_material(Writer& w, const MaterialModel& m) {
  w.section("material");
  w.kv("base_capacity", m.base_capacity);
  w.kv("conductivity", m.conductivity.reference);
  w.kv("conductivity_slope", m.conductivity.slope);
  w.kv("latent_heat", m.latent_heat);
  w.kv("transition_temp", m.transition_temp);
  w.kv("smoothing_width", m.smoothing_width);
}

void emit_scales(Writer& w, const ScaleSet& s) {
  w.section("scales");
  w.kv("T0", s.T0);
  w.kv("l0", s.l0);
  w.kv("tau", s.tau);
}

}  // namespace

std::string emit_config(const ExperimentSpec& spec) {
  Writer w;
  w.top("name", spec.name);
  w.top("kind", to_string(spec.kind));
  w.top("output_dir", "\"" + spec.output_dir + "\"");

  switch (spec.kind) {
    case ExperimentKind::kCartesian1D:
    case ExperimentKind::kConvergence:
    case ExperimentKind::kInstabilitySweep: {
      const auto& c = spec.simulation;
      w.section("grid");
      w.kv("n_x", c.grid_x.n_cells());
      w.kv("length", c.grid_x.length());
      w.kv("n_t", c.grid_t.n_cells());
      w.kv("t_max", c.grid_t.length());
      w.kv("store_stride", c.store_stride);
      emit_material(w, c.material);
      w.section("source");
      if (const auto* s = std::get_if<LogisticBeamSource>(&c.source)) {
        w.kv("type", "logistic");
        w.kv("amplitude", s->amplitude);
        w.kv("x_edge", s->x_edge);
        w.kv("t_edge", s->t_edge);
        w.kv("steepness_x", s->steepness_x);
        w.kv("steepness_t", s->steepness_t);
      } else {
        w.kv("type", "none");
      }
      emit_scheme(w, c.scheme);
      w.section("initial");
      w.kv("temperature", c.initial_temp);
      w.kv("mode_amplitude", c.initial_mode_amplitude);
      const auto& a = spec.analysis;
      w.section("analysis");
      w.kv("probe_offset", a.probe_offset);
      w.kv("max_jump_cells", a.max_jump_cells);
      w.kv("tableland_min_cells", a.tableland_min_cells);
      w.kv("instability_epsilon", a.instability_epsilon);
      w.kv("instability_threshold", a.instability_threshold);
      w.kv("residual_drop", a.residual_drop);
      if (spec.kind == ExperimentKind::kConvergence) {
        w.section("convergence");
        w.kv("levels", spec.convergence.levels);
        w.kv("refine", spec.convergence.refine);
        w.kv("reference", spec.convergence.reference == ConvergenceReference::kAnalytic ? "analytic" : "fine");
      }
      emit_scales(w, spec.scales);
      break;
    }
    case ExperimentKind::kLumped: {
      const auto& l = spec.lumped;
      emit_material(w, l.material);
      w.section("lumped");
      w.kv("t_max", l.t_max);
      w.kv("n_steps", l.n_steps);
      w.kv("initial_temp", l.options.initial_temp);
      w.kv("plateau_band", l.options.plateau_band);
      w.section("source");
      const char* kind = l.source.kind == TimeSourceKind::kConstant ? "constant"
                         : l.source.kind == TimeSourceKind::kRamp   ? "ramp"
                                                                    : "logistic";
      w.kv("type", kind);
      w.kv("value", l.source.value);
      w.kv("slope", l.source.slope);
      w.kv("amplitude", l.source.amplitude);
      w.kv("t_edge", l.source.t_edge);
      w.kv("steepness_t", l.source.steepness);
      emit_scales(w, spec.scales);
      break;
    }
    case ExperimentKind::kThermalSpike: {
      const auto& c = spec.spike;
      const auto& m = c.material;
      w.section("grid");
      w.kv("n_r", c.grid_r.n_cells());
      w.kv("r_max", c.grid_r.length());
      w.kv("n_t", c.grid_t.n_cells());
      w.kv("t_max", c.grid_t.length());
      w.kv("store_stride", c.store_stride);
      w.section("electron");
      w.kv("capacity", m.electron_capacity.base);
      w.kv("capacity_slope", m.electron_capacity.slope);
      w.kv("conductivity", m.electron_conductivity.reference);
      w.kv("conductivity_slope", m.electron_conductivity.slope);
      if (!std::isnan(c.initial_electron_temp)) w.kv("initial_temp", c.initial_electron_temp);
      w.section("lattice");
      w.kv("capacity", m.lattice_capacity.base);
      w.kv("capacity_slope", m.lattice_capacity.slope);
      w.kv("latent_heat", m.lattice_capacity.latent);
      w.kv("transition_temp", m.lattice_capacity.delta.center);
      w.kv("smoothing_width", m.lattice_capacity.delta.width);
      w.kv("conductivity", m.lattice_conductivity.reference);
      w.kv("conductivity_slope", m.lattice_conductivity.slope);
      if (!std::isnan(c.initial_lattice_temp)) w.kv("initial_temp", c.initial_lattice_temp);
      w.section("spike");
      w.kv("density", m.density);
      w.kv("coupling", m.coupling);
      w.kv("ambient_temp", c.ambient_temp);
      w.section("source");
      if (const auto* s = std::get_if<GaussianPulseSource>(&c.source)) {
        w.kv("type", "gaussian");
        w.kv("energy", s->energy);
        w.kv("radius", s->radius);
        w.kv("duration", s->duration);
        w.kv("t_peak", s->t_peak);
      } else {
        w.kv("type", "none");
      }
      emit_scheme(w, c.scheme);
      w.section("analysis");
      w.kv("tableland_min_cells", spec.analysis.tableland_min_cells);
      emit_scales(w, spec.scales);
      break;
    }
  }
  return w.str();
}

ExperimentSpec apply_overrides(const ExperimentSpec& spec, const std::map<std::string, std::string>& overrides) {
  auto doc = parse_document(emit_config(spec));
  for (const auto& [k, v] : overrides) {
    if (!doc.entries.count(k)) doc.order.push_back(k);
    doc.entries[k] = {v, 0, 0};
  }
  // Re-serialise section by section so the result goes through parse_config.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  std::vector<std::string> section_order;
  std::ostringstream os;
  for (const auto& key : doc.order) {
    const auto dot = key.find('.');
    const auto& value = doc.entries[key].value;
    if (dot == std::string::npos) {
      os << key << " = \"" << value << "\"\n";
      continue;
    }
    const auto sec = key.substr(0, dot);
    if (!sections.count(sec)) section_order.push_back(sec);
    sections[sec].push_back({key.substr(dot + 1), value});
  }
  for (const auto& sec : section_order) {
    os << "\n[" << sec << "]\n";
    for (const auto& [k, v] : sections[sec]) os << k << " = " << v << "\n";
  }
  return parse_config(os.str());
}

ExperimentSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace stefan
