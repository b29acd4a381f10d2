#pragma once

#include <numbers>

#include "qmpemba/numerics.hpp"

// Single-qubit operators. Basis index 0 is the ground state of -2*pi*nu*sigma_z
// (the sigma_z = +1 eigenstate), index 1 the excited state.
namespace qmpemba::ops {

inline ComplexMatrix identity(Index d = 2) { return ComplexMatrix::Identity(d, d); }

inline ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

inline ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// Energy-lowering |0><1|.
inline ComplexMatrix sigma_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

// Energy-raising |1><0|.
inline ComplexMatrix sigma_plus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

enum class PauliAxis { kX, kY, kZ };

inline ComplexMatrix pauli(PauliAxis axis) {
  switch (axis) {
  case PauliAxis::kX:
    return sigma_x();
  case PauliAxis::kY:
    return sigma_y();
  case PauliAxis::kZ:
    break;
  }
  return sigma_z();
}

/// -2*pi*nu*sigma_axis in rad/ms for nu in kHz.
inline ComplexMatrix qubit_hamiltonian(double nu_khz, PauliAxis axis) {
  return -2.0 * std::numbers::pi * nu_khz * pauli(axis);
}

} // namespace qmpemba::ops
