#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qmpemba {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kBiorthonormalityTol = 1e-10;
inline constexpr double kEigenResidualTol = 1e-9;
// Eigenvalue magnitude below which logm_principal refuses the input.
inline constexpr double kLogSingularTol = 1e-12;

/// Full eigensystem of a general (non-Hermitian) square matrix.
///
/// Right eigenvectors are the columns of `right_vectors` (unit 2-norm), left
/// eigenvectors are the rows of `left_vectors`, scaled so that
/// `left_vectors * right_vectors == I`. Eigenvalues come in solver order.
struct EigenSystem {
  ComplexVector eigenvalues;
  ComplexMatrix right_vectors;
  ComplexMatrix left_vectors;
  // 2-norm condition number of the right eigenvector matrix.
  double condition_estimate = 1.0;
};

/// Eigendecomposition of a diagonalizable complex matrix.
///
/// Throws NonConvergence when the Schur reduction fails, DefectiveMatrix when
/// the eigenvector matrix is numerically singular or the biorthonormality /
/// residual checks miss their tolerances.
EigenSystem eig_general(const ComplexMatrix& a);

/// Matrix exponential by Pade-13 scaling and squaring.
ComplexMatrix expm(const ComplexMatrix& a);

/// Principal logarithm V diag(Log lambda) V^-1.
///
/// Throws SingularInput when an eigenvalue has magnitude below 1e-12 and
/// BranchCut when one sits on the closed negative real axis.
ComplexMatrix logm_principal(const ComplexMatrix& a);

/// Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

bool all_finite(const ComplexMatrix& a);

/// `n` evenly spaced points on [lo, hi], both endpoints included.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

} // namespace qmpemba
