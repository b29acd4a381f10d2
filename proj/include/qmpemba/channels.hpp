#pragma once

#include <string>
#include <vector>

#include "qmpemba/liouville.hpp"

namespace qmpemba {

/// Thermal bath seen through an auxiliary qubit with Hamiltonian
/// -2*pi*gap*sigma_z prepared in its Gibbs state.
struct ThermalEnvironment {
  double temperature_khz = 4.77; // k_B T / h
  double gap_khz = 2.0;          // nu

  /// e^{-2 nu / T} / (1 + e^{-2 nu / T}).
  double excited_population() const;
  /// -2*pi*gap*sigma_z in rad/ms.
  ComplexMatrix hamiltonian() const;
};

struct KrausChannel {
  std::vector<ComplexMatrix> operators;
  std::vector<std::string> labels;
  double tau_ms = 0.0;
  double p_aux = 0.0;
  double coupling_hz = 0.0;

  SuperOperator transfer() const { return transfer_matrix(operators); }
};

/// (2J)^-1 in ms for J in Hz: the delay at which the exchange is a full swap.
double full_swap_time_ms(double j_hz);

/// Four-operator heat-exchange map of the scalar-coupled auxiliary qubit:
///   K1 = sqrt(1-p) [[1, 0], [0, c]]     K2 = sqrt(1-p) [[0, s], [0, 0]]
///   K3 = sqrt(p)   [[c, 0], [0, 1]]     K4 = sqrt(p)   [[0, 0], [-s, 0]]
/// with c = cos(pi J tau), s = sin(pi J tau), p the auxiliary excited
/// population. Throws TauOutOfRange outside [0, (2J)^-1].
KrausChannel build_heat_exchange(const ThermalEnvironment& env, double j_hz, double tau_ms);

/// Same channel expressed in another basis: K -> W K W^dag, where the columns
/// of the unitary W are the (ground, excited) states of the target Hamiltonian.
KrausChannel rotate_channel(const KrausChannel& ch, const ComplexMatrix& basis);

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);

/// max |sum_j K_j^dag K_j - I|.
double completeness_error(const KrausChannel& ch);

/// Choi matrix sum_{ij} |i><j| (x) E(|i><j|).
ComplexMatrix choi_matrix(const KrausChannel& ch);

struct GadReport {
  double eta = 0.0;           // decay parameter
  double p = 0.0;             // asymptotic excited population
  double max_deviation = 0.0; // over the tomographic input set
  bool pass = false;
};

/// Fits the channel to generalized amplitude damping
///   rho11 -> (1 - eta) rho11 + eta p,  rho01 -> sqrt(1 - eta) rho01
/// from its action on {|0>, |1>, |+>, |+i>} and reports the worst deviation
/// (pass iff < 1e-10).
GadReport verify_gad_equivalence(const KrausChannel& ch);

struct DaviesReport {
  double max_coupling = 0.0;
  bool pass = false;
};

/// Largest generator element linking population indices (i, i) with coherence
/// indices (i, j != i) in the given energy basis; pass iff < 1e-9.
DaviesReport verify_davies_blocks(const SuperOperator& gen, const ComplexMatrix& energy_basis);

SuperOperator extract_generator(const KrausChannel& ch, double t);

} // namespace qmpemba
