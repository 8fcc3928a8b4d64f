#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "oracles.hpp"
#include "stefan/analysis.hpp"
#include "stefan/config_parser.hpp"
#include "stefan/experiment.hpp"

using namespace stefan;

namespace {

TemperatureField sampled(std::size_t n, double L, double t, const std::function<double(double)>& f) {
  const Grid1D g(n, L);
  std::vector<double> v(g.node_count());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(g.node(j));
  return TemperatureField(g, std::move(v), t);
}

// Liquid-left kinked profile: slope -g_l left of xi, -g_s right of it.
TemperatureField kinked(std::size_t n, double t, double t_star, double xi, double g_l, double g_s) {
  return sampled(n, 1.0, t, [=](double x) { return x < xi ? t_star + g_l * (xi - x) : t_star - g_s * (x - xi); });
}

}  // namespace

TEST_CASE("a field entirely below T* has no front") {
  const auto f = sampled(20, 1.0, 0.0, [](double x) { return 1.0 + x; });
  CHECK(locate_fronts(f, 5.0).empty());
  CHECK(interphase_position(f, 5.0) == 0.0);
  CHECK(interphase_position(f, 0.5) == 1.0);
}

TEST_CASE("the linear profile 2 T* (1 - x) crosses at the midpoint") {
  const double t_star = 6.181;
  for (std::size_t n : {10u, 11u, 137u}) {
    const auto f = sampled(n, 1.0, 0.0, [=](double x) { return 2.0 * t_star * (1.0 - x); });
    const auto fr = locate_fronts(f, t_star);
    REQUIRE(fr.size() == 1);
    CHECK(fr[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("a tableland with two crossings reports both edges") {
  const double t_star = 2.0;
  const auto f = sampled(100, 1.0, 0.0, [=](double x) {
    if (x < 0.3) return t_star + 1.0 - x / 0.3;
    if (x <= 0.6) return t_star;
    return t_star - (x - 0.6);
  });
  const auto fr = locate_fronts(f, t_star);
  REQUIRE(fr.size() == 2);
  CHECK(fr.front() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fr.back() == doctest::Approx(0.6).epsilon(1e-12));
  const auto tl = tableland_metrics(f, t_star, 0.01, 3);
  CHECK(tl.cells == 30);
  CHECK(tl.width == doctest::Approx(0.3));
  CHECK(tl.extended);
  CHECK(tl.start == doctest::Approx(0.3));
  CHECK(tl.end == doctest::Approx(0.6));
}

TEST_CASE("crossings of random piecewise-linear fields are exact") {
  auto gen = oracle::rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double t_star = 6.181;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 20 + static_cast<std::size_t>(u(gen) * 80);
    const Grid1D g(n, 1.0 + u(gen));
    // Crossing cells separated by at least two cells, alternating sign between them.
    std::vector<std::size_t> cells;
    for (std::size_t c = 1 + static_cast<std::size_t>(u(gen) * 3); c + 1 < n; c += 2 + static_cast<std::size_t>(u(gen) * 6))
      cells.push_back(c);
    std::vector<double> v(g.node_count());
    std::vector<double> expected;
    double sign = u(gen) < 0.5 ? 1.0 : -1.0;
    std::size_t next = 0;
    bool skip = false;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (std::exchange(skip, false)) continue;  // set with its crossing cell
      v[j] = t_star + sign * (0.1 + u(gen));
      if (next < cells.size() && j == cells[next]) {
        const double w = 0.05 + 0.9 * u(gen);
        const double a = std::abs(v[j] - t_star);
        v[j + 1] = t_star - sign * a * (1.0 - w) / w;
        expected.push_back(g.node(j) + w * g.spacing());
        sign = -sign;
        ++next;
        skip = true;
      }
    }
    const auto fr = locate_fronts(TemperatureField(g, v, 0.0), t_star);
    REQUIRE(fr.size() == expected.size());
    for (std::size_t i = 0; i < fr.size(); ++i) CHECK(std::abs(fr[i] - expected[i]) < 1e-12);
  }
}

TEST_CASE("a uniform field away from T* has no tableland") {
  const auto f = sampled(50, 1.0, 0.0, [](double) { return 3.0; });
  const auto tl = tableland_metrics(f, 2.0, 0.02);
  CHECK(tl.width == 0.0);
  CHECK(tl.cells == 0);
  CHECK_FALSE(tl.extended);
}

TEST_CASE("sensitivity of a linear profile is the inverse slope") {
  auto gen = oracle::rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double t_star = 2.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double slope = 1.0 + 20.0 * u(gen);
    const double xi = 0.3 + 0.4 * u(gen);
    const auto f = sampled(200, 1.0, 0.0, [=](double x) { return t_star - slope * (x - xi); });
    const std::vector<TemperatureField> fields{f};
    const auto tab = delta_instability_sweep(fields, t_star, 0.01, 0.1);
    CHECK(tab.front[0] == doctest::Approx(xi).epsilon(1e-10));
    CHECK(tab.sensitivity[0] == doctest::Approx(1.0 / slope).epsilon(1e-8));
    CHECK(tab.flagged[0] == (1.0 / slope > 0.1));
    const auto zero = delta_instability_sweep(fields, t_star, 0.0, 0.1);
    CHECK(zero.sensitivity[0] == 0.0);
    CHECK_FALSE(zero.flagged[0]);
  }
}

TEST_CASE("the Stefan residual vanishes on a balanced moving front") {
  MaterialModel mat;
  mat.conductivity.reference = 0.5;
  mat.latent_heat = 2.0;
  mat.transition_temp = 2.0;
  mat.smoothing_width = 0.01;
  const double V = 0.1, g_l = 3.0;
  const double g_s = g_l - mat.latent_heat * V / mat.conductivity.reference;
  std::vector<TemperatureField> fields;
  for (int k = 0; k < 6; ++k) fields.push_back(kinked(100, 0.1 * k, 2.0, 0.3 + 0.01 * k, g_l, g_s));
  const auto res = stefan_residual(fields, mat);
  int defined = 0;
  for (std::size_t k = 0; k < res.phi.size(); ++k) {
    if (!res.defined[k]) continue;
    ++defined;
    CHECK(res.phi[k] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(res.velocity[k] == doctest::Approx(V).epsilon(1e-9));
  }
  CHECK(defined == 6);
}

TEST_CASE("a stationary front with unequal gradients reports the flux imbalance") {
  MaterialModel mat;
  mat.conductivity.reference = 0.5;
  mat.latent_heat = 2.0;
  mat.transition_temp = 2.0;
  mat.smoothing_width = 0.01;
  std::vector<TemperatureField> fields;
  for (int k = 0; k < 3; ++k) fields.push_back(kinked(100, 0.1 * k, 2.0, 0.4, 3.0, 1.0));
  const auto res = stefan_residual(fields, mat);
  for (std::size_t k = 0; k < 3; ++k) {
    REQUIRE(res.defined[k]);
    CHECK(res.phi[k] == doctest::Approx(0.5 * (3.0 - 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("front jumps beyond the gate are flagged and leave velocities undefined") {
  std::vector<TemperatureField> fields;
  for (double xi : {0.30, 0.31, 0.80, 0.81}) fields.push_back(kinked(100, fields.size() * 0.1, 2.0, xi, 1.0, 1.0));
  const auto tr = track_fronts(fields, 2.0, 5.0);
  CHECK_FALSE(tr.unstable[0]);
  CHECK(tr.unstable[1]);
  CHECK(tr.unstable[2]);
  CHECK_FALSE(tr.unstable[3]);
  CHECK(tr.velocities[0] == doctest::Approx(0.1));
  CHECK(tr.velocities[1] == doctest::Approx(0.1));
  const auto thick = melt_thickness(tr);
  CHECK(thick[2] == doctest::Approx(0.8));
  const auto wide = track_fronts(fields, 2.0, 60.0);
  CHECK_FALSE(wide.unstable[1]);
}

TEST_CASE("flat exterior surfaces that still heat are reported") {
  std::vector<TemperatureField> quiet;
  for (int k = 0; k < 4; ++k) quiet.push_back(kinked(100, 0.1 * k, 2.0, 0.5, 1.0, 1.0));
  const auto qs = exterior_surface_samples(quiet, 2.0);
  REQUIRE_FALSE(qs.empty());
  CHECK(exterior_surface_violations(qs, 1e-3).empty());
  std::vector<ExteriorSurfaceSample> synthetic{{0.1, 0.5, 1e-6, 5.0, 0.0}, {0.2, 0.5, 1.0, 5.0, 0.0}};
  const auto v = exterior_surface_violations(synthetic, 1e-3);
  REQUIRE(v.size() == 1);
  CHECK(v[0].time == 0.1);
}

TEST_CASE("log slope of an exact power law") {
  const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * x * x);
  CHECK(fit_log_slope(h, e) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("convergence order: second order at gamma 1/2, first order at gamma 1") {
  SimulationConfig cfg;
  cfg.grid_x = Grid1D(20, 1.0);
  cfg.grid_t = Grid1D(20, 0.1);
  cfg.material.latent_heat = 0.0;
  cfg.initial_mode_amplitude = 0.5;
  const std::vector<std::pair<std::size_t, std::size_t>> levels{{20, 20}, {40, 40}, {80, 80}, {160, 160}};
  const auto cn = convergence_study(cfg, levels, neumann_cosine_mode(cfg));
  CHECK(cn.order == doctest::Approx(2.0).epsilon(0.05));
  cfg.scheme.gamma = 1.0;
  const auto be = convergence_study(cfg, levels, neumann_cosine_mode(cfg));
  CHECK(be.order > 0.8);
  CHECK(be.order < 1.3);
  for (std::size_t i = 1; i < be.levels.size(); ++i) CHECK(be.levels[i].error < be.levels[i - 1].error);
  const auto fine = convergence_study(cfg, levels, 2);
  CHECK(fine.order > 0.8);
}

TEST_CASE("degenerate convergence studies are rejected") {
  SimulationConfig cfg;
  cfg.grid_x = Grid1D(10, 1.0);
  cfg.grid_t = Grid1D(10, 0.1);
  cfg.material.latent_heat = 0.0;
  const auto ref = neumann_cosine_mode(cfg);
  const std::vector<std::pair<std::size_t, std::size_t>> two{{10, 10}, {20, 20}};
  const std::vector<std::pair<std::size_t, std::size_t>> repeated{{10, 10}, {20, 20}, {20, 20}};
  CHECK_THROWS_AS(convergence_study(cfg, two, ref), std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(cfg, repeated, ref), std::invalid_argument);
  CHECK_THROWS_AS(fit_log_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("classical limit: small residual after relaxation and quasi-steady front speed") {
  const auto spec = load_spec_file(std::string(STEFAN_SPEC_DIR) + "/control_classical_limit.ini");
  const auto res = run_cartesian(spec);
  const auto& mat = spec.simulation.material;
  const auto& src = std::get<LogisticBeamSource>(spec.simulation.source);
  REQUIRE(res.relaxation_time);
  const double t1 = *res.relaxation_time;
  // Surface flux: the sliver source integrated over depth.
  const double flux = src.amplitude * oracle::logistic_integral(1.0, src.x_edge, src.steepness_x);
  double v_max = 0.0;
  for (std::size_t k = 0; k < res.fronts.times.size(); ++k)
    if (res.fronts.times[k] >= t1 && std::isfinite(res.fronts.velocities[k]))
      v_max = std::max(v_max, std::abs(res.fronts.velocities[k]));
  REQUIRE(v_max > 0.0);
  int checked = 0;
  double worst_phi = 0.0, worst_speed = 0.0;
  for (std::size_t k = 0; k < res.residual.times.size(); ++k) {
    const double t = res.residual.times[k];
    if (t < t1 || !res.residual.defined[k]) continue;
    ++checked;
    worst_phi = std::max(worst_phi, std::abs(res.residual.phi[k]));
    // Flux less the conduction into the semi-infinite solid preheating from 1 to T*,
    // shared by the latent heat and the storage of the linear liquid layer.
    const double xi = res.fronts.exterior[k];
    const double k0 = mat.conductivity.reference;
    const double preheat = (mat.transition_temp - 1.0) * std::sqrt(k0 / (std::numbers::pi * t));
    const double v_qs = (flux - preheat) / (mat.latent_heat + flux * xi / k0);
    worst_speed = std::max(worst_speed, std::abs(res.fronts.velocities[k] - v_qs) / v_qs);
  }
  CHECK(checked > 50);
  CHECK(worst_phi < 0.05 * mat.latent_heat * v_max);
  CHECK(worst_speed < 0.05);
}

TEST_CASE("exterior surface on a beam trace: flat gradients do not coexist with heating") {
  auto spec = load_spec_file(std::string(STEFAN_SPEC_DIR) + "/paper_fig6_thickness.ini");
  auto cfg = spec.simulation;
  cfg.grid_x = Grid1D(200, 1.0);
  cfg.grid_t = Grid1D(1200, 3.0);
  cfg.store_stride = 4;
  const auto tr = run_simulation(cfg);
  const auto samples = exterior_surface_samples(tr.fields, cfg.material.transition_temp);
  CHECK(samples.size() > 100);
  CHECK(exterior_surface_violations(samples, 0.1).empty());
}
