#include "qmpemba/otto.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmpemba/detail/parallel.hpp"
#include "qmpemba/errors.hpp"
#include "qmpemba/mpemba.hpp"

namespace qmpemba {

namespace {

constexpr double kReachTol = 1e-12;

ComplexMatrix cold_hamiltonian(const CycleConfig& cfg) {
  return ops::qubit_hamiltonian(cfg.nu0_khz, ops::PauliAxis::kX);
}

ComplexMatrix expanded_hamiltonian(const CycleConfig& cfg) {
  return ops::qubit_hamiltonian(cfg.nu1_khz, ops::PauliAxis::kX);
}

ComplexMatrix cooling_hamiltonian(const CycleConfig& cfg) {
  return ops::qubit_hamiltonian(cfg.nu1_khz, ops::PauliAxis::kZ);
}

// Columns: ground |x+>, excited |x->  of -2 pi nu sigma_x.
ComplexMatrix x_energy_basis() {
  ComplexMatrix w(2, 2);
  w << 1.0, 1.0, 1.0, -1.0;
  return w / std::sqrt(2.0);
}

ThermalEnvironment hot_environment(const CycleConfig& cfg) {
  return {cfg.t_hot_khz, cfg.nu1_khz};
}

DensityMatrix evolve_unitary(const ComplexMatrix& u, const DensityMatrix& rho) {
  const ComplexMatrix m = u * rho.matrix() * u.adjoint();
  return DensityMatrix::from_matrix(0.5 * (m + m.adjoint()));
}

double energy(const ComplexMatrix& h, const DensityMatrix& rho) { return mean_energy(rho, h); }

StrokeRecord make_record(StrokeKind kind, double duration, const ComplexMatrix& h_start,
                         const DensityMatrix& in, const ComplexMatrix& h_end,
                         DensityMatrix out) {
  StrokeRecord r;
  r.name = kind;
  r.duration_ms = duration;
  r.h_start = h_start;
  r.h_end = h_end;
  r.energy_in = energy(h_start, in);
  r.energy_out = energy(h_end, out);
  r.state_after = std::move(out);
  return r;
}

double first_reach(const RelaxationTrajectory& tr, double delta) {
  const auto& t = tr.times;
  const auto& d = tr.trace_dist;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] <= delta + kReachTol) {
      if (k == 0) {
        return t[0];
      }
      const double span = d[k - 1] - d[k];
      const double frac = span > 0.0 ? std::clamp((d[k - 1] - delta) / span, 0.0, 1.0) : 1.0;
      return t[k - 1] + frac * (t[k] - t[k - 1]);
    }
  }
  throw ThresholdUnreachable("threshold_times: curve '" + tr.label + "' never reaches delta = " +
                             std::to_string(delta));
}

void fill_distance_point(const CycleConfig& cfg, const DensityMatrix& start, double tau2,
                         const DensityMatrix& target, double f_eq, RelaxationTrajectory& tr,
                         std::size_t k) {
  const ComplexMatrix h = cooling_hamiltonian(cfg);
  DensityMatrix state =
      apply_channel(build_heat_exchange(hot_environment(cfg), cfg.j_hz, tau2), start);
  tr.times[k] = tau2;
  tr.f_neq[k] = f_neq(state, h, cfg.t_hot_khz);
  tr.delta_f_neq[k] = tr.f_neq[k] - f_eq;
  tr.trace_dist[k] = trace_distance(state, target);
  tr.states[k] = std::move(state);
}

RelaxationTrajectory sized_trajectory(std::size_t n, const char* label) {
  RelaxationTrajectory tr;
  tr.label = label;
  tr.times.resize(n);
  tr.states.assign(n, DensityMatrix::maximally_mixed(2));
  tr.f_neq.resize(n);
  tr.delta_f_neq.resize(n);
  tr.trace_dist.resize(n);
  return tr;
}

template <class Loop>
DistanceCurves distance_curves_impl(const CycleConfig& cfg, std::span<const double> tau2_grid,
                                    Loop&& loop) {
  cfg.validate();
  const DensityMatrix target = hot_equilibrium(cfg);
  const double f_eq = equilibrium_free_energy({cooling_hamiltonian(cfg), cfg.t_hot_khz});
  const DensityMatrix plain_start = cooling_input(cfg, false);
  const DensityMatrix mb_start = cooling_input(cfg, true);

  DistanceCurves curves{sized_trajectory(tau2_grid.size(), "plain"),
                        sized_trajectory(tau2_grid.size(), "mb")};
  loop(tau2_grid.size(), [&](std::size_t k) {
    fill_distance_point(cfg, plain_start, tau2_grid[k], target, f_eq, curves.plain, k);
    fill_distance_point(cfg, mb_start, tau2_grid[k], target, f_eq, curves.mpemba, k);
  });
  curves.plain.check();
  curves.mpemba.check();
  return curves;
}

PowerReport power_point(const DistanceCurves& curves, const CycleConfig& cfg, double delta) {
  const Thresholds t = threshold_times(curves, delta);
  PowerReport r;
  r.delta = delta;
  r.tau2_plain = t.tau2_plain;
  r.tau2_mb = t.tau2_mb;
  r.ratio = (cfg.tau_bar_ms + t.tau2_plain) / (cfg.tau_bar_ms + cfg.mpemba_duration_ms + t.tau2_mb);
  return r;
}

auto serial_loop = [](std::size_t n, auto&& body) {
  for (std::size_t k = 0; k < n; ++k) {
    body(k);
  }
};

auto parallel_loop = [](std::size_t n, auto&& body) { detail::parallel_for(n, body); };

} // namespace

void CycleConfig::validate() const {
  if (!(nu0_khz > 0.0)) {
    throw ValidationError("nu0_khz", "must be positive");
  }
  if (!(nu1_khz > nu0_khz)) {
    throw ValidationError("nu1_khz", "must exceed nu0_khz");
  }
  if (!(j_hz > 0.0)) {
    throw ValidationError("j_hz", "must be positive");
  }
  if (!(t_hot_khz > 0.0)) {
    throw ValidationError("t_hot_khz", "must be positive");
  }
  if (!(t_cold_khz > 0.0)) {
    throw ValidationError("t_cold_khz", "must be positive");
  }
  if (!(tau1_ms > 0.0)) {
    throw ValidationError("tau1_us", "must be positive");
  }
  if (!(tau_bar_ms > 0.0)) {
    throw ValidationError("tau_bar_ms", "must be positive");
  }
  if (!(mpemba_duration_ms >= 0.0)) {
    throw ValidationError("mpemba_duration_us", "must be non-negative");
  }
}

std::string_view stroke_name(StrokeKind kind) {
  switch (kind) {
  case StrokeKind::kExpansion:
    return "EXPANSION";
  case StrokeKind::kMpemba:
    return "MPEMBA";
  case StrokeKind::kCooling:
    return "COOLING";
  case StrokeKind::kCompression:
    return "COMPRESSION";
  case StrokeKind::kHotReset:
    break;
  }
  return "HOT_RESET";
}

ComplexMatrix ramp_unitary(double nu_start_khz, double nu_end_khz, double duration_ms,
                           ops::PauliAxis axis) {
  if (!(duration_ms > 0.0)) {
    throw DomainError("ramp_unitary: duration must be positive");
  }
  const double phi = 2.0 * std::numbers::pi * 0.5 * (nu_start_khz + nu_end_khz) * duration_ms;
  return std::cos(phi) * ops::identity() + Complex(0.0, std::sin(phi)) * ops::pauli(axis);
}

DensityMatrix cold_equilibrium(const CycleConfig& cfg) {
  return gibbs_state({cold_hamiltonian(cfg), cfg.t_cold_khz});
}

DensityMatrix hot_equilibrium(const CycleConfig& cfg) {
  return gibbs_state({cooling_hamiltonian(cfg), cfg.t_hot_khz});
}

DensityMatrix cooling_input(const CycleConfig& cfg, bool use_mpemba) {
  const ComplexMatrix expand =
      ramp_unitary(cfg.nu0_khz, cfg.nu1_khz, cfg.tau1_ms, ops::PauliAxis::kX);
  DensityMatrix rho = evolve_unitary(expand, cold_equilibrium(cfg));
  if (use_mpemba) {
    rho = mpemba_unitary(rho, cooling_hamiltonian(cfg), cfg.t_hot_khz).target_state;
  }
  return rho;
}

std::vector<StrokeRecord> run_cycle(const CycleConfig& cfg, double tau2_ms) {
  cfg.validate();
  if (!(tau2_ms >= 0.0) || tau2_ms > cfg.tau2_max_ms() * (1.0 + 1e-12)) {
    throw TauOutOfRange("run_cycle: tau2 = " + std::to_string(tau2_ms) + " ms outside [0, " +
                        std::to_string(cfg.tau2_max_ms()) + "]");
  }
  const ComplexMatrix h_cold = cold_hamiltonian(cfg);
  const ComplexMatrix h_expanded = expanded_hamiltonian(cfg);
  const ComplexMatrix h_cool = cooling_hamiltonian(cfg);

  std::vector<StrokeRecord> records;
  DensityMatrix rho = cold_equilibrium(cfg);

  {
    const auto u = ramp_unitary(cfg.nu0_khz, cfg.nu1_khz, cfg.tau1_ms, ops::PauliAxis::kX);
    DensityMatrix out = evolve_unitary(u, rho);
    records.push_back(
        make_record(StrokeKind::kExpansion, cfg.tau1_ms, h_cold, rho, h_expanded, out));
    rho = std::move(out);
  }
  if (cfg.use_mpemba) {
    DensityMatrix out = mpemba_unitary(rho, h_cool, cfg.t_hot_khz).target_state;
    records.push_back(
        make_record(StrokeKind::kMpemba, cfg.mpemba_duration_ms, h_cool, rho, h_cool, out));
    rho = std::move(out);
  }
  {
    const auto ch = build_heat_exchange(hot_environment(cfg), cfg.j_hz, tau2_ms);
    DensityMatrix out = apply_channel(ch, rho);
    records.push_back(make_record(StrokeKind::kCooling, tau2_ms, h_cool, rho, h_cool, out));
    rho = std::move(out);
  }
  {
    const auto u = ramp_unitary(cfg.nu1_khz, cfg.nu0_khz, cfg.tau3_ms(), ops::PauliAxis::kX);
    DensityMatrix out = evolve_unitary(u, rho);
    records.push_back(
        make_record(StrokeKind::kCompression, cfg.tau3_ms(), h_expanded, rho, h_cold, out));
    rho = std::move(out);
  }
  {
    const ThermalEnvironment cold{cfg.t_cold_khz, cfg.nu0_khz};
    const auto ch =
        rotate_channel(build_heat_exchange(cold, cfg.j_hz, cfg.tau4_ms()), x_energy_basis());
    DensityMatrix out = apply_channel(ch, rho);
    records.push_back(make_record(StrokeKind::kHotReset, cfg.tau4_ms(), h_cold, rho, h_cold, out));
  }
  return records;
}

HeatReport heat_extracted(const std::vector<StrokeRecord>& records, const CycleConfig& cfg) {
  auto find = [&](StrokeKind kind) -> const StrokeRecord& {
    for (const auto& r : records) {
      if (r.name == kind) {
        return r;
      }
    }
    throw MissingStroke("heat_extracted: no " + std::string(stroke_name(kind)) + " stroke");
  };
  const StrokeRecord& compression = find(StrokeKind::kCompression);
  const StrokeRecord& reset = find(StrokeKind::kHotReset);

  HeatReport report;
  const DensityMatrix rho_cold = cold_equilibrium(cfg);
  report.q_cold_literal = energy(expanded_hamiltonian(cfg), rho_cold) -
                          energy(cold_hamiltonian(cfg), compression.state_after);
  report.q_cold_stroke = reset.energy_out - reset.energy_in;

  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const double change = r.energy_out - r.energy_in;
    switch (r.name) {
    case StrokeKind::kCooling:
      report.heat_aux += change;
      break;
    case StrokeKind::kHotReset:
      break;
    default:
      report.work += change;
    }
    if (k + 1 < records.size()) {
      report.work += records[k + 1].energy_in - r.energy_out;
    }
  }
  report.net = records.back().energy_out - records.front().energy_in;
  report.first_law_residual =
      std::abs(report.net - (report.heat_aux + report.q_cold_stroke + report.work));
  return report;
}

DistanceCurves distance_curves(const CycleConfig& cfg, std::span<const double> tau2_grid) {
  return distance_curves_impl(cfg, tau2_grid, parallel_loop);
}

DistanceCurves distance_curves_serial(const CycleConfig& cfg, std::span<const double> tau2_grid) {
  return distance_curves_impl(cfg, tau2_grid, serial_loop);
}

Thresholds threshold_times(const DistanceCurves& curves, double delta) {
  return {first_reach(curves.plain, delta), first_reach(curves.mpemba, delta)};
}

QmeWindow qme_window(const DistanceCurves& curves) {
  QmeWindow w;
  const CrossingReport crossing =
      detect_crossing(curves.mpemba, curves.plain, Observable::kTraceDistance);
  if (!crossing.exists) {
    return w;
  }
  w.has_crossing = true;
  w.tau_cross = crossing.t_cross;

  const auto& t = curves.plain.times;
  const auto& plain = curves.plain.trace_dist;
  const auto& mb = curves.mpemba.trace_dist;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (t[k] >= w.tau_cross) {
      const double frac = (w.tau_cross - t[k - 1]) / (t[k] - t[k - 1]);
      w.delta_cross = plain[k - 1] + frac * (plain[k] - plain[k - 1]);
      break;
    }
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double sep = plain[k] - mb[k];
    if (t[k] > w.tau_cross && sep > w.max_separation) {
      w.max_separation = sep;
      w.tau_max_sep = t[k];
      w.delta_at_max_sep = plain[k];
    }
  }
  return w;
}

std::vector<double> default_delta_grid(const QmeWindow& window, std::size_t steps) {
  if (!window.has_crossing) {
    return {};
  }
  return uniform_grid(0.0, window.delta_cross, steps);
}

std::vector<PowerReport> power_ratio(const DistanceCurves& curves, const CycleConfig& cfg,
                                     std::span<const double> delta_grid) {
  std::vector<PowerReport> out(delta_grid.size());
  detail::parallel_for(delta_grid.size(),
                       [&](std::size_t k) { out[k] = power_point(curves, cfg, delta_grid[k]); });
  return out;
}

std::vector<PowerReport> power_ratio_serial(const DistanceCurves& curves, const CycleConfig& cfg,
                                            std::span<const double> delta_grid) {
  std::vector<PowerReport> out;
  out.reserve(delta_grid.size());
  for (double delta : delta_grid) {
    out.push_back(power_point(curves, cfg, delta));
  }
  return out;
}

std::vector<PowerReport> power_ratio(const CycleConfig& cfg, std::span<const double> delta_grid,
                                     std::span<const double> tau2_grid) {
  return power_ratio(distance_curves(cfg, tau2_grid), cfg, delta_grid);
}

} // namespace qmpemba
