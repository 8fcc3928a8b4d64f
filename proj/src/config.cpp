#include "stefan/config.hpp"

#include <cmath>
#include <sstream>

namespace stefan {

const char* to_string(CapacityTreatment c) {
  switch (c) {
    case CapacityTreatment::kLagged: return "lagged";
    case CapacityTreatment::kChord: return "chord";
  }
  return "lagged";
}

namespace {

std::string describe(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : v) os << "\n  " << e.field << ": " << e.rule;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

std::vector<Violation> validate_config(const SimulationConfig& cfg) {
  std::vector<Violation> out;
  const auto& m = cfg.material;
  const auto& s = cfg.scheme;

  if (!(s.gamma >= 0.0 && s.gamma <= 1.0))
    out.push_back({"scheme.gamma", "must lie in [0, 1]"});
  if (s.capacity == CapacityTreatment::kChord && s.max_iterations < 1)
    out.push_back({"scheme.max_iterations", "must be >= 1"});
  if (!(s.iteration_tolerance > 0.0))
    out.push_back({"scheme.tolerance", "must be > 0"});

  if (cfg.grid_x.n_cells() < 3)
    out.push_back({"grid.n_x", "must be >= 3 (ghost-point boundaries need an interior)"});

  if (!(m.base_capacity > 0.0)) out.push_back({"material.base_capacity", "must be > 0"});
  if (!(m.latent_heat >= 0.0)) out.push_back({"material.latent_heat", "must be >= 0"});
  if (!(m.smoothing_width > 0.0)) out.push_back({"material.smoothing_width", "must be > 0"});
  if (!(m.transition_temp > 1.0))
    out.push_back({"material.transition_temp", "must be > 1 (above the reference temperature)"});
  if (!std::isfinite(cfg.initial_temp))
    out.push_back({"initial.temperature", "must be finite"});
  else if (!(cfg.initial_temp < m.transition_temp))
    out.push_back({"initial.temperature", "must be below material.transition_temp (solid start)"});

  // k(T) > 0 over the range the run can plausibly visit.
  const double t_lo = cfg.initial_temp - std::abs(cfg.initial_mode_amplitude);
  const double t_hi = std::max(m.transition_temp + 10.0 * m.smoothing_width,
                               cfg.initial_temp + std::abs(cfg.initial_mode_amplitude));
  if (!(m.conductivity(t_lo) > 0.0) || !(m.conductivity(t_hi) > 0.0))
    out.push_back({"material.conductivity", "k(T) must be > 0 over the simulated range"});

  try {
    validate_source(cfg.source);
  } catch (const std::invalid_argument& e) {
    out.push_back({"source", e.what()});
  }
  return out;
}

const SimulationConfig& require_valid(const SimulationConfig& cfg) {
  auto v = validate_config(cfg);
  if (!v.empty()) throw ConfigError(std::move(v));
  return cfg;
}

std::size_t effective_store_stride(std::size_t requested, std::size_t n_t) {
  if (requested > 0) return requested;
  constexpr std::size_t kMaxStored = 10000;
  return n_t <= kMaxStored ? 1 : (n_t + kMaxStored - 1) / kMaxStored;
}

}  // namespace stefan
