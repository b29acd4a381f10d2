#pragma once

#include <span>
#include <vector>

#include "qmpemba/numerics.hpp"

namespace qmpemba {

struct StateTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double positivity = 1e-10;
};

/// Validated d x d density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
public:
  /// Throws InvalidState when `m` violates any invariant beyond `tol`.
  static DensityMatrix from_matrix(const ComplexMatrix& m, StateTolerance tol = {});
  static DensityMatrix diagonal(std::span<const double> populations);
  static DensityMatrix pure(const ComplexVector& psi);
  static DensityMatrix maximally_mixed(Index d);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  /// Eigenvalues in ascending order.
  Eigen::VectorXd eigenvalues() const;

private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

enum class Stacking { kRow };

/// |rho>> with vec(rho)[i*d + j] = rho(i, j). Under this convention
/// vec(A rho B) = (A (x) B^T) vec(rho).
struct VectorizedState {
  ComplexVector amplitudes;
  Stacking convention = Stacking::kRow;

  Index dim() const;
};

ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v);

VectorizedState vectorize(const DensityMatrix& rho);
DensityMatrix devectorize(const VectorizedState& v);

/// Generator (units 1/ms) or transfer matrix (dimensionless) on row-stacked
/// vectors.
struct SuperOperator {
  ComplexMatrix matrix;

  Index dim() const;
};

struct JumpOperator {
  ComplexMatrix op;
  double rate = 0.0;
};

/// L = -i (H (x) I - I (x) H^T) + sum_k g_k (A (x) A* - 1/2 (A^dag A (x) I + I (x) (A^dag A)^T)).
///
/// `h` in rad/ms. Throws NegativeRate for g_k < 0.
SuperOperator build_lindbladian(const ComplexMatrix& h, std::span<const JumpOperator> jumps);

/// Transfer matrix sum_j K_j (x) conj(K_j) of a Kraus map.
SuperOperator transfer_matrix(std::span<const ComplexMatrix> kraus);

/// Generator (1/t) Log(transfer matrix). Throws SingularInput / BranchCut from
/// logm_principal and TauOutOfRange for t <= 0.
SuperOperator extract_generator(std::span<const ComplexMatrix> kraus, double t);

/// Eigenmodes sorted by ascending |Re lambda|, ties by ascending |Im lambda|
/// then ascending Im lambda. Mode 0 is the stationary mode: its right vector is
/// the trace-one fixed point and its left vector the trace functional.
/// Inside every degenerate cluster the right vectors are brought to reduced
/// row-echelon form, so the basis of a degenerate pair does not depend on the
/// eigensolver.
struct SpectralDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix right_modes; // columns |zeta_k>>
  ComplexMatrix left_modes;  // rows <<xi_k|
  DensityMatrix fixed_point = DensityMatrix::maximally_mixed(1);
  double condition_estimate = 1.0;

  Index size() const noexcept { return eigenvalues.size(); }
};

SpectralDecomposition decompose(const SuperOperator& l);

/// sum_k exp(t lambda_k) |zeta_k>> <<xi_k|rho0>>, re-Hermitized.
/// Throws HermiticityLoss if the raw result deviates from Hermitian by > 1e-8.
DensityMatrix propagate_spectral(const SpectralDecomposition& dec, const DensityMatrix& rho0,
                                 double t);

/// expm(t L) |rho0>> for cross-checking the spectral route.
DensityMatrix propagate_expm(const SuperOperator& l, const DensityMatrix& rho0, double t);

/// <<xi_k|rho>>, k counted from 0 (the stationary mode).
Complex mode_overlap(const SpectralDecomposition& dec, Index k, const DensityMatrix& rho);

/// Similarity transform of a superoperator into the basis whose columns are
/// given by the unitary `basis` (rho -> basis^dag rho basis).
SuperOperator to_basis(const SuperOperator& l, const ComplexMatrix& basis);

} // namespace qmpemba
