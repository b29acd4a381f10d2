#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qmpemba/channels.hpp"
#include "qmpemba/operators.hpp"
#include "qmpemba/thermo.hpp"

namespace qmpemba {

/// Physical parameters of the four-stroke Otto refrigerator. Frequencies and
/// temperatures in kHz, coupling in Hz, times in ms.
struct CycleConfig {
  double nu0_khz = 1.0;
  double nu1_khz = 2.0;
  double j_hz = 215.1;
  double t_hot_khz = 4.77;
  double t_cold_khz = 2.38;
  double tau1_ms = 0.1;
  double tau_bar_ms = 4.65;
  double mpemba_duration_ms = 0.0;
  bool use_mpemba = true;

  double tau3_ms() const { return tau1_ms; }
  double tau4_ms() const { return full_swap_time_ms(j_hz); }
  double tau2_max_ms() const { return full_swap_time_ms(j_hz); }
  /// tau1 + tau3 + tau4 from the stroke durations (tau_bar_ms is configured
  /// separately).
  double stroke_time_sum_ms() const { return tau1_ms + tau3_ms() + tau4_ms(); }

  /// Throws ValidationError naming the offending config key.
  void validate() const;
};

enum class StrokeKind { kExpansion, kMpemba, kCooling, kCompression, kHotReset };

std::string_view stroke_name(StrokeKind kind);

struct StrokeRecord {
  StrokeKind name = StrokeKind::kExpansion;
  double duration_ms = 0.0;
  double energy_in = 0.0;  // Tr[h_start rho_in], kHz
  double energy_out = 0.0; // Tr[h_end rho_out], kHz
  ComplexMatrix h_start;
  ComplexMatrix h_end;
  DensityMatrix state_after = DensityMatrix::maximally_mixed(2);
};

/// Evolution under H(t) = -2 pi nu(t) sigma_axis with nu linear from nu_start
/// to nu_end. The Hamiltonians commute at all times, so the propagator is
/// exp(i phi sigma_axis) with phi = 2 pi (nu_start + nu_end)/2 * duration.
ComplexMatrix ramp_unitary(double nu_start_khz, double nu_end_khz, double duration_ms,
                           ops::PauliAxis axis);

/// Cold Gibbs state of -2 pi nu0 sigma_x at t_cold.
DensityMatrix cold_equilibrium(const CycleConfig& cfg);
/// Hot Gibbs state of -2 pi nu1 sigma_z at t_hot (fixed point of the cooling stroke).
DensityMatrix hot_equilibrium(const CycleConfig& cfg);

/// State entering the cooling stroke: cold equilibrium after the expansion
/// ramp, Mpemba-transformed toward the cooling Hamiltonian if requested.
DensityMatrix cooling_input(const CycleConfig& cfg, bool use_mpemba);

/// Executes expansion, optional Mpemba step (cfg.use_mpemba), cooling for
/// tau2, compression and full thermalization with the cold environment.
/// Throws TauOutOfRange for tau2 outside [0, (2J)^-1].
std::vector<StrokeRecord> run_cycle(const CycleConfig& cfg, double tau2_ms);

struct HeatReport {
  // Tr[H(tau1) rho_eq,c] - Tr[H0 rho_tau3] with H(tau1) = -2 pi nu1 sigma_x.
  double q_cold_literal = 0.0;
  // Energy absorbed during the cold thermalization stroke.
  double q_cold_stroke = 0.0;
  // Energy change during the cooling (auxiliary bath) stroke.
  double heat_aux = 0.0;
  // Unitary strokes plus Hamiltonian switches between strokes.
  double work = 0.0;
  // Final minus initial energy; zero for a closed cycle.
  double net = 0.0;
  // |net - (heat_aux + q_cold_stroke + work)|.
  double first_law_residual = 0.0;
};

/// All energies in kHz. Throws MissingStroke if the compression or reset
/// stroke is absent.
HeatReport heat_extracted(const std::vector<StrokeRecord>& records, const CycleConfig& cfg);

struct DistanceCurves {
  RelaxationTrajectory plain;
  RelaxationTrajectory mpemba;
};

/// Trace distance to the hot equilibrium (plus f_neq) along the cooling stroke,
/// with and without the Mpemba step, evaluated in parallel over the grid.
DistanceCurves distance_curves(const CycleConfig& cfg, std::span<const double> tau2_grid);
DistanceCurves distance_curves_serial(const CycleConfig& cfg, std::span<const double> tau2_grid);

struct Thresholds {
  double tau2_plain = 0.0;
  double tau2_mb = 0.0;
};

/// Earliest interpolated tau2 at which each curve falls to delta (values
/// within 1e-12 of delta count as reached). Throws ThresholdUnreachable when a
/// curve stays above delta on the whole grid.
Thresholds threshold_times(const DistanceCurves& curves, double delta);

/// Where the Mpemba advantage lives on the delta axis.
struct QmeWindow {
  bool has_crossing = false;
  double tau_cross = 0.0;      // curves cross here
  double delta_cross = 0.0;    // trace distance at the crossing
  double tau_max_sep = 0.0;    // grid point of largest plain - mb
  double max_separation = 0.0;
  double delta_at_max_sep = 0.0; // plain curve value there
};

QmeWindow qme_window(const DistanceCurves& curves);

inline constexpr std::size_t kDefaultDeltaSteps = 40;

/// Uniform thresholds on [0, delta_cross].
std::vector<double> default_delta_grid(const QmeWindow& window,
                                       std::size_t steps = kDefaultDeltaSteps);

struct PowerReport {
  double delta = 0.0;
  double tau2_plain = 0.0;
  double tau2_mb = 0.0;
  double ratio = 1.0;
};

/// R(delta) = (tau_bar + tau2_plain) / (tau_bar + mpemba_duration + tau2_mb).
std::vector<PowerReport> power_ratio(const DistanceCurves& curves, const CycleConfig& cfg,
                                     std::span<const double> delta_grid);
std::vector<PowerReport> power_ratio_serial(const DistanceCurves& curves, const CycleConfig& cfg,
                                            std::span<const double> delta_grid);
/// Builds the distance curves on `tau2_grid` first.
std::vector<PowerReport> power_ratio(const CycleConfig& cfg, std::span<const double> delta_grid,
                                     std::span<const double> tau2_grid);

} // namespace qmpemba
