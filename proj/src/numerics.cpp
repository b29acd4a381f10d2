#include "qmpemba/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "qmpemba/errors.hpp"

namespace qmpemba {

namespace {

void require_square(const ComplexMatrix& a, const char* who) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw ShapeMismatch(std::string(who) + ": expected a non-empty square matrix, got " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!all_finite(a)) {
    throw DomainError(std::string(who) + ": matrix has non-finite entries");
  }
}

// Eigenvector matrices with a larger 2-norm condition number are treated as
// numerically defective.
constexpr double kMaxEigenvectorCondition = 1e12;

} // namespace

bool all_finite(const ComplexMatrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> grid(n);
  if (n == 1) {
    grid[0] = lo;
    return grid;
  }
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  if (n > 1) {
    grid.back() = hi;
  }
  return grid;
}

EigenSystem eig_general(const ComplexMatrix& a) {
  require_square(a, "eig_general");
  const Index n = a.rows();

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NonConvergence("eig_general: Schur reduction did not converge");
  }

  EigenSystem sys;
  sys.eigenvalues = solver.eigenvalues();
  sys.right_vectors = solver.eigenvectors();
  for (Index k = 0; k < n; ++k) {
    sys.right_vectors.col(k).normalize();
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(sys.right_vectors);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  sys.condition_estimate = smallest > 0.0 ? sv(0) / smallest : INFINITY;
  if (!(sys.condition_estimate < kMaxEigenvectorCondition)) {
    throw DefectiveMatrix("eig_general: eigenvector matrix is singular (condition estimate " +
                          std::to_string(sys.condition_estimate) + ")");
  }

  sys.left_vectors = sys.right_vectors.partialPivLu().inverse();

  const double ortho_err =
      (sys.left_vectors * sys.right_vectors - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (ortho_err > kBiorthonormalityTol) {
    throw DefectiveMatrix("eig_general: biorthonormality error " + std::to_string(ortho_err));
  }

  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Index k = 0; k < n; ++k) {
    const double residual =
        (a * sys.right_vectors.col(k) - sys.eigenvalues(k) * sys.right_vectors.col(k)).norm();
    if (residual > kEigenResidualTol * scale) {
      throw DefectiveMatrix("eig_general: eigenpair residual " + std::to_string(residual));
    }
  }
  return sys;
}

ComplexMatrix expm(const ComplexMatrix& a) {
  require_square(a, "expm");
  const Index n = a.rows();

  // Pade(13) coefficients and theta_13 from Higham, SIAM J. Matrix Anal. 26 (2005).
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  const ComplexMatrix x = a / std::ldexp(1.0, squarings);

  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix x2 = x * x;
  const ComplexMatrix x4 = x2 * x2;
  const ComplexMatrix x6 = x4 * x2;

  const ComplexMatrix u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 +
                                b[5] * x4 + b[3] * x2 + b[1] * id;
  const ComplexMatrix u = x * u_inner;
  const ComplexMatrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 +
                          b[2] * x2 + b[0] * id;

  ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) {
    r = r * r;
  }
  return r;
}

ComplexMatrix logm_principal(const ComplexMatrix& a) {
  require_square(a, "logm_principal");
  const EigenSystem sys = eig_general(a);

  ComplexVector log_eigs(sys.eigenvalues.size());
  for (Index k = 0; k < sys.eigenvalues.size(); ++k) {
    const Complex lambda = sys.eigenvalues(k);
    const double mag = std::abs(lambda);
    if (mag < kLogSingularTol) {
      throw SingularInput("logm_principal: eigenvalue magnitude " + std::to_string(mag) +
                          " below 1e-12; shrink tau");
    }
    if (lambda.real() < 0.0 && std::abs(lambda.imag()) <= 1e-10 * mag) {
      throw BranchCut("logm_principal: eigenvalue on the negative real axis");
    }
    log_eigs(k) = std::log(lambda);
  }
  return sys.right_vectors * log_eigs.asDiagonal() * sys.left_vectors;
}

} // namespace qmpemba
