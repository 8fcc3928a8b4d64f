#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stefan/delta_enthalpy.hpp"
#include "stefan/lumped.hpp"
#include "stefan/solver1d.hpp"

using namespace stefan;

namespace {

MaterialModel melt(double latent, double t_star, double width) {
  MaterialModel m;
  m.latent_heat = latent;
  m.transition_temp = t_star;
  m.smoothing_width = width;
  return m;
}

// Closed-form enthalpy, written independently of the library.
double oracle_enthalpy(const MaterialModel& m, double T) {
  const auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double w = m.smoothing_width;
  return m.base_capacity * (T - 1.0) +
         m.latent_heat * (Phi((T - m.transition_temp) / w) - Phi((1.0 - m.transition_temp) / w));
}

// Time at which the trace first reaches T* (linear interpolation in T).
double crossing_time(const LumpedTrace& tr, double level) {
  for (std::size_t i = 1; i < tr.times.size(); ++i)
    if (tr.temps[i - 1] < level && tr.temps[i] >= level) {
      const double w = (level - tr.temps[i - 1]) / (tr.temps[i] - tr.temps[i - 1]);
      return tr.times[i - 1] + w * (tr.times[i] - tr.times[i - 1]);
    }
  return NAN;
}

}  // namespace

TEST_CASE("zero power leaves the temperature fixed and never melts") {
  const auto mat = melt(1.0, 2.0, 0.01);
  const auto tr = solve_lumped(mat, [](double) { return 0.0; }, 2.0, 200);
  for (double T : tr.temps) CHECK(T == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(tr.has_plateau());
  CHECK(tr.delta_t() == 0.0);
  CHECK_THROWS_AS(check_transition_bound(tr, mat, [](double) { return 0.0; }), NoPlateauError);
}

TEST_CASE("constant power reaches T* when the enthalpy budget is spent") {
  const auto mat = melt(1.0, 2.0, 0.01);
  const double Q = 1.0;
  const auto tr = solve_lumped(mat, [Q](double) { return Q; }, 3.0, 3000);
  // Sensible heat plus the half of the latent heat released below T*.
  const double expected = oracle_enthalpy(mat, 2.0) / Q;
  CHECK(crossing_time(tr, 2.0) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(expected == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("constant power gives a plateau of latent_heat / Q within one percent") {
  const auto mat = melt(1.0, 2.0, 0.01);
  const double Q = 1.0;
  const auto q = [Q](double) { return Q; };
  const auto tr = solve_lumped(mat, q, 3.0, 3000);
  REQUIRE(tr.has_plateau());
  const double band_enthalpy = oracle_enthalpy(mat, 2.02) - oracle_enthalpy(mat, 1.98);
  CHECK(tr.delta_t() == doctest::Approx(band_enthalpy / Q).epsilon(1e-8));
  CHECK(std::abs(tr.delta_t() - mat.latent_heat / Q) / (mat.latent_heat / Q) < 0.01);
  const auto rep = check_transition_bound(tr, mat, q);
  CHECK(rep.satisfied);
  CHECK(rep.tolerance == doctest::Approx(0.04));
}

TEST_CASE("enthalpy follows the integrated power and inverts back to temperature") {
  const auto mat = melt(1.5, 2.2, 0.02);
  const auto q = [](double t) { return 0.7 + 0.5 * std::sin(3.0 * t) + 0.4 * t; };
  const auto tr = solve_lumped(mat, q, 4.0, 400);
  for (std::size_t i = 0; i < tr.times.size(); i += 37) {
    const double H = oracle::simpson(q, 0.0, tr.times[i], 1e-13);
    CHECK(tr.enthalpy[i] == doctest::Approx(H).epsilon(1e-10));
    CHECK(oracle_enthalpy(mat, tr.temps[i]) == doctest::Approx(tr.enthalpy[i]).epsilon(1e-9));
  }
  for (std::size_t i = 1; i < tr.temps.size(); ++i) CHECK(tr.temps[i] >= tr.temps[i - 1]);
}

TEST_CASE("time-varying power never beats the latent bound") {
  auto gen = oracle::rng(20261014);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto mat = melt(0.5 + 2.0 * u(gen), 1.5 + u(gen), 0.005 + 0.03 * u(gen));
    TimeFunction q;
    if (trial % 2 == 0) {
      const double a = 0.2 + 2.0 * u(gen), b = 3.0 * u(gen);
      q = [a, b](double t) { return a + b * t; };
    } else {
      const double a = 0.5 + 2.0 * u(gen), amp = a * u(gen), w = 1.0 + 10.0 * u(gen);
      q = [a, amp, w](double t) { return a + amp * std::sin(w * t); };
    }
    const auto tr = solve_lumped(mat, q, 20.0, 8000);
    if (!tr.has_plateau()) continue;
    ++checked;
    const auto rep = check_transition_bound(tr, mat, q);
    CHECK_MESSAGE(rep.satisfied, "trial " << trial << " delta_t " << rep.delta_t << " bound " << rep.latent_time);
  }
  CHECK(checked >= 45);
}

TEST_CASE("a linear ramp holds the plateau longer than latent_heat / q at its end") {
  const auto mat = melt(1.0, 2.0, 0.01);
  const double a = 2.0;
  const auto q = [a](double t) { return a * t; };
  const auto tr = solve_lumped(mat, q, 3.0, 30000);
  REQUIRE(tr.has_plateau());
  CHECK(tr.delta_t() > mat.latent_heat / q(*tr.plateau_end));
  CHECK(check_transition_bound(tr, mat, q).satisfied);
}

TEST_CASE("without latent heat the plateau shrinks to the smoothing band") {
  const auto mat = melt(0.0, 2.0, 0.01);
  const auto tr = solve_lumped(mat, [](double) { return 1.0; }, 2.0, 2000);
  REQUIRE(tr.has_plateau());
  CHECK(tr.delta_t() == doctest::Approx(4.0 * mat.smoothing_width).epsilon(1e-8));
}

TEST_CASE("a spatially uniform 1D run reproduces the lumped solution") {
  SimulationConfig cfg;
  cfg.grid_x = Grid1D(8, 1.0);
  cfg.grid_t = Grid1D(1500, 3.0);
  cfg.material = melt(1.0, 2.0, 0.01);
  cfg.material.conductivity.reference = 0.5;
  cfg.source = LogisticBeamSource{1.0, 1e6, 1e6, 1.0, 1.0};
  cfg.scheme.capacity = CapacityTreatment::kChord;
  cfg.store_stride = 10;
  const auto sim = run_simulation(cfg);
  const auto tr = solve_lumped(cfg.material, [](double) { return 1.0; }, 3.0, 1500);
  REQUIRE(sim.unconverged_steps() == 0);
  double worst = 0.0;
  for (std::size_t s = 0; s < sim.fields.size(); ++s) {
    const double ref = tr.temps[sim.field_levels[s]];
    for (double T : sim.fields[s].values()) worst = std::max(worst, std::abs(T - ref));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("invalid time ranges are rejected") {
  const auto mat = melt(1.0, 2.0, 0.01);
  CHECK_THROWS_AS(solve_lumped(mat, [](double) { return 1.0; }, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(solve_lumped(mat, [](double) { return 1.0; }, 0.0, 10), std::invalid_argument);
}
