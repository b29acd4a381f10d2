#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qmpemba/errors.hpp"
#include "qmpemba/operators.hpp"
#include "qmpemba/otto.hpp"

using namespace qmpemba;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I{0.0, 1.0};

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Piecewise-constant propagator with midpoint sampling of nu(t).
ComplexMatrix stepped_ramp(double nu_start, double nu_end, double duration, int steps,
                           ops::PauliAxis axis) {
  const double dt = duration / steps;
  ComplexMatrix u = ops::identity();
  for (int k = 0; k < steps; ++k) {
    const double nu = nu_start + (nu_end - nu_start) * (k + 0.5) / steps;
    u = expm(-I * dt * ops::qubit_hamiltonian(nu, axis)) * u;
  }
  return u;
}

// Closed forms for the default cycle: x-polarized cold state of Bloch length
// r = tanh(nu0/Tc), hot target along z with z_h = tanh(nu1/Th), and a channel
// that scales x by c and relaxes z by c^2.
double plain_distance(const CycleConfig& cfg, double tau2) {
  const double r = std::tanh(cfg.nu0_khz / cfg.t_cold_khz);
  const double zh = std::tanh(cfg.nu1_khz / cfg.t_hot_khz);
  const double c = std::cos(kPi * cfg.j_hz * 1e-3 * tau2);
  return 0.5 * std::abs(c) * std::sqrt(r * r + zh * zh * c * c);
}

double mpemba_distance(const CycleConfig& cfg, double tau2) {
  const double r = std::tanh(cfg.nu0_khz / cfg.t_cold_khz);
  const double zh = std::tanh(cfg.nu1_khz / cfg.t_hot_khz);
  const double c = std::cos(kPi * cfg.j_hz * 1e-3 * tau2);
  return 0.5 * (r + zh) * c * c;
}

} // namespace

TEST_CASE("config validation") {
  CycleConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.tau2_max_ms() == doctest::Approx(2.3245).epsilon(1e-4));
  CHECK(cfg.stroke_time_sum_ms() == doctest::Approx(0.2 + cfg.tau4_ms()));

  cfg.nu1_khz = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    CHECK(e.key() == "nu1_khz");
  }
  cfg = CycleConfig{};
  cfg.t_cold_khz = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = CycleConfig{};
  cfg.j_hz = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("stroke names") {
  CHECK(stroke_name(StrokeKind::kExpansion) == "EXPANSION");
  CHECK(stroke_name(StrokeKind::kMpemba) == "MPEMBA");
  CHECK(stroke_name(StrokeKind::kCooling) == "COOLING");
  CHECK(stroke_name(StrokeKind::kCompression) == "COMPRESSION");
  CHECK(stroke_name(StrokeKind::kHotReset) == "HOT_RESET");
}

TEST_CASE("ramp unitary") {
  SUBCASE("default expansion accumulates a 0.3 pi phase") {
    const ComplexMatrix u = ramp_unitary(1.0, 2.0, 0.1, ops::PauliAxis::kX);
    const double phi = 0.3 * kPi;
    const ComplexMatrix expected = std::cos(phi) * ops::identity() + I * std::sin(phi) * ops::sigma_x();
    CHECK(max_abs(u - expected) < 1e-14);
  }
  SUBCASE("matches a 1000-step piecewise-constant product") {
    for (auto axis : {ops::PauliAxis::kX, ops::PauliAxis::kY, ops::PauliAxis::kZ}) {
      for (double duration : {0.05, 0.1, 0.37}) {
        const ComplexMatrix exact = ramp_unitary(1.0, 2.0, duration, axis);
        CHECK(max_abs(exact - stepped_ramp(1.0, 2.0, duration, 1000, axis)) < 1e-8);
        CHECK(max_abs(ramp_unitary(2.0, 1.0, duration, axis) -
                      stepped_ramp(2.0, 1.0, duration, 1000, axis)) < 1e-8);
      }
    }
  }
  SUBCASE("expansion then compression composes to twice the phase") {
    const ComplexMatrix up = ramp_unitary(1.0, 2.0, 0.1, ops::PauliAxis::kX);
    const ComplexMatrix down = ramp_unitary(2.0, 1.0, 0.1, ops::PauliAxis::kX);
    const double phi = 0.6 * kPi;
    const ComplexMatrix expected = std::cos(phi) * ops::identity() + I * std::sin(phi) * ops::sigma_x();
    CHECK(max_abs(down * up - expected) < 1e-14);
  }
}

TEST_CASE("equilibrium states") {
  const CycleConfig cfg;
  const DensityMatrix cold = cold_equilibrium(cfg);
  CHECK(cold(0, 1).real() == doctest::Approx(0.5 * std::tanh(1.0 / 2.38)));
  const DensityMatrix hot = hot_equilibrium(cfg);
  CHECK(hot(1, 1).real() == doctest::Approx(0.301835).epsilon(1e-5));
}

TEST_CASE("cycle structure and closure") {
  CycleConfig cfg;
  const auto with_mb = run_cycle(cfg, 1.0);
  REQUIRE(with_mb.size() == 5);
  CHECK(with_mb[1].name == StrokeKind::kMpemba);
  CHECK(with_mb[2].duration_ms == 1.0);
  cfg.use_mpemba = false;
  const auto plain = run_cycle(cfg, 1.0);
  REQUIRE(plain.size() == 4);
  CHECK(plain[0].name == StrokeKind::kExpansion);
  CHECK(plain[1].name == StrokeKind::kCooling);
  CHECK(plain[2].name == StrokeKind::kCompression);
  CHECK(plain[3].name == StrokeKind::kHotReset);

  CHECK_THROWS_AS(run_cycle(cfg, -0.1), TauOutOfRange);
  CHECK_THROWS_AS(run_cycle(cfg, cfg.tau2_max_ms() + 0.1), TauOutOfRange);
}

TEST_CASE("closed-cycle recurrence and energy balance on random settings") {
  std::mt19937_64 rng(17);
  const CycleConfig base;
  std::uniform_real_distribution<double> tau_dist(0.0, base.tau2_max_ms());
  std::bernoulli_distribution coin(0.5);
  const DensityMatrix start = cold_equilibrium(base);
  for (int i = 0; i < 10; ++i) {
    CycleConfig cfg = base;
    cfg.use_mpemba = coin(rng);
    const auto records = run_cycle(cfg, tau_dist(rng));
    CHECK(max_abs(records.back().state_after.matrix() - start.matrix()) < 1e-10);
    const HeatReport h = heat_extracted(records, cfg);
    CHECK(std::abs(h.net) < 1e-8);
    CHECK(h.first_law_residual < 1e-8);
    // Closed cycle: heats and work cancel.
    CHECK(std::abs(h.heat_aux + h.q_cold_stroke + h.work) < 1e-8);
  }
}

TEST_CASE("full-swap cooling lands on the hot Gibbs state") {
  for (bool use_mb : {false, true}) {
    CycleConfig cfg;
    cfg.use_mpemba = use_mb;
    const auto records = run_cycle(cfg, cfg.tau2_max_ms());
    const auto& cooled = records[use_mb ? 2 : 1];
    CHECK(cooled.name == StrokeKind::kCooling);
    CHECK(max_abs(cooled.state_after.matrix() - hot_equilibrium(cfg).matrix()) < 1e-12);
  }
}

TEST_CASE("heat_extracted needs the closing strokes") {
  const CycleConfig cfg;
  auto records = run_cycle(cfg, 0.5);
  records.pop_back();
  CHECK_THROWS_AS(heat_extracted(records, cfg), MissingStroke);
}

TEST_CASE("literal cold heat on a full-swap cycle") {
  CycleConfig cfg;
  cfg.use_mpemba = false;
  const auto records = run_cycle(cfg, cfg.tau2_max_ms());
  const HeatReport h = heat_extracted(records, cfg);
  // After a full swap the compressed state is the hot Gibbs state of the z
  // Hamiltonian, which has no x polarization: Tr[H0 rho] = 0.
  const double r = std::tanh(cfg.nu0_khz / cfg.t_cold_khz);
  CHECK(h.q_cold_literal == doctest::Approx(-cfg.nu1_khz * r).epsilon(1e-12));
  CHECK(h.q_cold_stroke == doctest::Approx(-cfg.nu0_khz * r).epsilon(1e-12));
}

TEST_CASE("distance curves follow their closed forms") {
  const CycleConfig cfg;
  const auto grid = uniform_grid(0.0, cfg.tau2_max_ms(), 64);
  const DistanceCurves curves = distance_curves(cfg, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(curves.plain.trace_dist[k] == doctest::Approx(plain_distance(cfg, grid[k])).epsilon(1e-12));
    CHECK(curves.mpemba.trace_dist[k] ==
          doctest::Approx(mpemba_distance(cfg, grid[k])).epsilon(1e-12));
  }
  CHECK(curves.plain.label == "plain");
  CHECK(curves.mpemba.label == "mb");
}

TEST_CASE("parallel and serial sweeps agree exactly") {
  const CycleConfig cfg;
  const auto grid = uniform_grid(0.0, cfg.tau2_max_ms(), 64);
  const DistanceCurves a = distance_curves(cfg, grid);
  const DistanceCurves b = distance_curves_serial(cfg, grid);
  CHECK(a.plain.trace_dist == b.plain.trace_dist);
  CHECK(a.mpemba.trace_dist == b.mpemba.trace_dist);
  CHECK(a.plain.f_neq == b.plain.f_neq);

  const auto deltas = default_delta_grid(qme_window(a));
  const auto ra = power_ratio(a, cfg, deltas);
  const auto rb = power_ratio_serial(b, cfg, deltas);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    CHECK(ra[k].ratio == rb[k].ratio);
    CHECK(ra[k].tau2_plain == rb[k].tau2_plain);
  }
}

TEST_CASE("QME window") {
  const CycleConfig cfg;
  const auto grid = uniform_grid(0.0, cfg.tau2_max_ms(), 64);
  const QmeWindow w = qme_window(distance_curves(cfg, grid));
  REQUIRE(w.has_crossing);
  // plain = mb at c^2 = r^2 / (r^2 + 2 r zh).
  const double r = std::tanh(cfg.nu0_khz / cfg.t_cold_khz);
  const double zh = std::tanh(cfg.nu1_khz / cfg.t_hot_khz);
  const double c = std::sqrt(r * r / (r * r + 2.0 * r * zh));
  const double tau_exact = std::acos(c) / (kPi * cfg.j_hz * 1e-3);
  const double step = grid[1] - grid[0];
  CHECK(std::abs(w.tau_cross - tau_exact) < step);
  CHECK(w.tau_max_sep > w.tau_cross);
  CHECK(w.max_separation > 0.0);
  CHECK(w.delta_cross == doctest::Approx(plain_distance(cfg, tau_exact)).epsilon(1e-2));
  const auto deltas = default_delta_grid(w);
  CHECK(deltas.size() == kDefaultDeltaSteps);
  CHECK(deltas.front() == 0.0);
  CHECK(deltas.back() == doctest::Approx(w.delta_cross));
}

TEST_CASE("threshold times") {
  const CycleConfig cfg;
  const auto grid = uniform_grid(0.0, cfg.tau2_max_ms(), 64);
  const DistanceCurves curves = distance_curves(cfg, grid);
  const Thresholds zero = threshold_times(curves, 0.0);
  CHECK(zero.tau2_plain == doctest::Approx(cfg.tau2_max_ms()));
  CHECK(zero.tau2_mb == doctest::Approx(cfg.tau2_max_ms()));
  const Thresholds start = threshold_times(curves, 1.0);
  CHECK(start.tau2_plain == 0.0);
  CHECK_THROWS_AS(threshold_times(curves, -0.01), ThresholdUnreachable);
}

TEST_CASE("power ratio") {
  const CycleConfig cfg;
  const auto grid = uniform_grid(0.0, cfg.tau2_max_ms(), 64);
  const DistanceCurves curves = distance_curves(cfg, grid);
  const auto reports = power_ratio(curves, cfg, default_delta_grid(qme_window(curves)));
  REQUIRE(!reports.empty());
  for (const auto& r : reports) {
    CHECK(r.ratio >= 1.0 - 1e-12);
    CHECK(r.ratio == doctest::Approx((cfg.tau_bar_ms + r.tau2_plain) /
                                     (cfg.tau_bar_ms + cfg.mpemba_duration_ms + r.tau2_mb)));
  }
  CHECK(reports.front().ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reports.back().ratio == doctest::Approx(1.0).epsilon(1e-3));

  SUBCASE("a slow Mpemba stroke eats the gain") {
    CycleConfig slow = cfg;
    slow.mpemba_duration_ms = 1.0;
    for (const auto& r : power_ratio(curves, slow, default_delta_grid(qme_window(curves)))) {
      CHECK(r.ratio < 1.0);
    }
  }
  SUBCASE("convenience overload builds the same curves") {
    const auto deltas = default_delta_grid(qme_window(curves));
    const auto direct = power_ratio(cfg, deltas, grid);
    REQUIRE(direct.size() == reports.size());
    for (std::size_t k = 0; k < reports.size(); ++k) {
      CHECK(direct[k].ratio == reports[k].ratio);
    }
  }
}
