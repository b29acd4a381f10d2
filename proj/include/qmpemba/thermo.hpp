#pragma once

#include <string>
#include <vector>

#include "qmpemba/liouville.hpp"

// Thermodynamic functionals. Hamiltonians are angular frequencies in rad/ms;
// every energy-like return value is in kHz (h = k_B = 1), i.e. Tr(H rho) / 2pi.
namespace qmpemba {

struct GibbsSpec {
  ComplexMatrix hamiltonian;
  double temperature_khz = 1.0;
};

DensityMatrix gibbs_state(const GibbsSpec& spec);

/// -T ln Z.
double equilibrium_free_energy(const GibbsSpec& spec);

/// Tr(H rho) in kHz.
double mean_energy(const DensityMatrix& rho, const ComplexMatrix& h);

/// -Tr(rho ln rho); eigenvalues below 1e-15 contribute zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// Tr(H rho) - T S(rho), in kHz.
double f_neq(const DensityMatrix& rho, const ComplexMatrix& h, double temperature_khz);

/// Tr[rho (ln rho - ln sigma)]. Throws SingularReference when sigma has an
/// eigenvalue <= 1e-12.
double kl_divergence(const DensityMatrix& rho, const DensityMatrix& sigma);

/// 1/2 Tr|rho - sigma|.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Same spectrum as rho, populations decreasing with energy, diagonal in the
/// eigenbasis of h.
DensityMatrix passive_state(const DensityMatrix& rho, const ComplexMatrix& h);

struct RelaxationTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> f_neq;       // kHz
  std::vector<double> delta_f_neq; // f_neq - F_eq, kHz
  std::vector<double> trace_dist;
  std::string label;

  /// Throws GridMismatch on length disagreement or non-ascending times.
  void check() const;
};

enum class Observable { kFreeEnergy, kTraceDistance };

struct CrossingReport {
  bool exists = false;
  double t_cross = 0.0;
  bool persistent = false;
};

/// Earliest sign change of (a - b) in the chosen observable, linearly
/// interpolated between grid points. Differences within 1e-12 count as ties.
/// `persistent` holds when a never exceeds b (beyond 1e-12) after t_cross and
/// is strictly below it at some later grid time.
CrossingReport detect_crossing(const RelaxationTrajectory& a, const RelaxationTrajectory& b,
                               Observable observable);

} // namespace qmpemba
