#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qmpemba/channels.hpp"
#include "qmpemba/thermo.hpp"

namespace qmpemba {

struct MpembaTransform {
  ComplexMatrix unitary;
  DensityMatrix source_state = DensityMatrix::maximally_mixed(2);
  DensityMatrix target_state = DensityMatrix::maximally_mixed(2);
  double f_neq_gain = 0.0; // kHz
  // <<xi_2|rho>> before/after; zero when no generator was supplied.
  Complex slow_overlap_before{};
  Complex slow_overlap_after{};
};

/// Unitary that diagonalizes rho in the eigenbasis of h with population
/// inversion: the k-th smallest eigenvalue of rho lands on the k-th lowest
/// energy level, so the largest population sits on the highest level and
/// Tr(H rho) is maximal over the unitary orbit.
///
/// U = sum_k |e_k><r_k| with e_k, r_k the ascending eigenvectors of h and rho,
/// each phase-fixed so its first nonzero entry is real positive.
/// Throws DegenerateHamiltonian when h has a repeated eigenvalue.
MpembaTransform mpemba_unitary(const DensityMatrix& rho, const ComplexMatrix& h,
                               double temperature_khz);

/// As above, also filling the slow-mode overlaps against `generator`.
MpembaTransform mpemba_unitary(const DensityMatrix& rho, const ComplexMatrix& h,
                               double temperature_khz, const SpectralDecomposition& generator);

/// p_plus |x+><x+| + p_minus |x-><x-| with |x+-> the sigma_x eigenstates.
DensityMatrix x_basis_state(double p_plus, double p_minus);

/// exp(-i theta sigma_y / 2).
ComplexMatrix rotation_y(double theta);

struct ThetaFamily {
  DensityMatrix base_state = DensityMatrix::maximally_mixed(2);
  std::vector<double> angles;
  std::vector<DensityMatrix> rotated_states;
};

ThetaFamily build_theta_family(const DensityMatrix& base, std::span<const double> theta_grid);

struct SurfacePoint {
  double theta = 0.0;
  double tau_ms = 0.0;
  double f_neq = 0.0;       // kHz
  double delta_f_neq = 0.0; // kHz above equilibrium
};

using ChannelBuilder = std::function<KrausChannel(double tau_ms)>;

/// f_neq of every rotated state after the channel at every tau, theta-major.
/// Rows are evaluated in parallel; `channel_builder` must be safe to call
/// concurrently.
std::vector<SurfacePoint> free_energy_surface(const ThetaFamily& family,
                                              const ChannelBuilder& channel_builder,
                                              std::span<const double> tau_grid,
                                              const ComplexMatrix& h, double temperature_khz);

/// Single-threaded reference for free_energy_surface.
std::vector<SurfacePoint> free_energy_surface_serial(const ThetaFamily& family,
                                                     const ChannelBuilder& channel_builder,
                                                     std::span<const double> tau_grid,
                                                     const ComplexMatrix& h,
                                                     double temperature_khz);

/// First tau at which delta_f_neq drops to `epsilon_khz` (linear
/// interpolation), or nullopt if it never does on the grid.
std::optional<double> equilibration_time(std::span<const double> tau_grid,
                                         std::span<const double> delta_f_neq, double epsilon_khz);

/// Heat-exchange relaxation of rho0 (optionally Mpemba-transformed first),
/// recording f_neq, its excess over equilibrium and the trace distance to the
/// bath's Gibbs state at every tau.
RelaxationTrajectory cooling_curves(const DensityMatrix& rho0, const ThermalEnvironment& env,
                                    double j_hz, std::span<const double> tau_grid,
                                    bool with_mpemba);

} // namespace qmpemba
