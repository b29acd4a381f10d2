#include "qmpemba/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "qmpemba/errors.hpp"

namespace qmpemba {

namespace {

constexpr double kStationaryTol = 1e-8;
constexpr double kHermiticityRepairLimit = 1e-8;
constexpr double kHermiticityLogThreshold = 1e-12;

// Tolerances applied to states produced by propagation.
constexpr StateTolerance kPropagatedTol{kHermiticityRepairLimit, 1e-9, 1e-8};

Index isqrt_dim(Index n, const char* who) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n) {
    throw ShapeMismatch(std::string(who) + ": length " + std::to_string(n) +
                        " is not a perfect square");
  }
  return d;
}

double hermiticity_deviation(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix repaired_state(const ComplexMatrix& raw, const char* who) {
  const double dev = hermiticity_deviation(raw);
  if (dev > kHermiticityRepairLimit) {
    throw HermiticityLoss(std::string(who) + ": Hermiticity deviation " + std::to_string(dev));
  }
  if (dev > kHermiticityLogThreshold) {
    std::clog << who << ": symmetrized state, Hermiticity deviation " << dev << '\n';
  }
  return DensityMatrix::from_matrix(0.5 * (raw + raw.adjoint()), kPropagatedTol);
}

// Orders eigenvalue indices by |Re|, then |Im|, then Im. Values closer than
// `tol` in a key are treated as equal for that key.
std::vector<Index> spectral_order(const ComplexVector& lambda, double tol) {
  std::vector<Index> order(static_cast<std::size_t>(lambda.size()));
  std::iota(order.begin(), order.end(), Index{0});

  auto refine = [&](auto key, std::vector<Index>::iterator first, std::vector<Index>::iterator last,
                    auto&& next) -> void {
    std::stable_sort(first, last, [&](Index a, Index b) { return key(a) < key(b); });
    auto run = first;
    while (run != last) {
      auto end = run + 1;
      while (end != last && key(*end) - key(*run) <= tol) {
        ++end;
      }
      next(run, end);
      run = end;
    }
  };

  auto abs_re = [&](Index k) { return std::abs(lambda(k).real()); };
  auto abs_im = [&](Index k) { return std::abs(lambda(k).imag()); };
  auto im = [&](Index k) { return lambda(k).imag(); };
  auto done = [](auto, auto) {};

  refine(abs_re, order.begin(), order.end(), [&](auto f1, auto l1) {
    refine(abs_im, f1, l1, [&](auto f2, auto l2) { refine(im, f2, l2, done); });
  });
  return order;
}

// Rewrites the column block `cols` of `v` as the reduced row-echelon basis of
// its span (taken as rows of the transpose), so degenerate eigenspaces get a
// solver-independent basis.
void canonicalize_cluster(ComplexMatrix& v, Index first, Index count) {
  ComplexMatrix w = v.middleCols(first, count).transpose(); // count x n
  const Index n = w.cols();
  const double tol = 1e-8 * std::max(1.0, w.cwiseAbs().maxCoeff());

  Index row = 0;
  for (Index col = 0; col < n && row < count; ++col) {
    Index pivot = row;
    for (Index r = row + 1; r < count; ++r) {
      if (std::abs(w(r, col)) > std::abs(w(pivot, col))) {
        pivot = r;
      }
    }
    if (std::abs(w(pivot, col)) <= tol) {
      continue;
    }
    w.row(row).swap(w.row(pivot));
    w.row(row) /= w(row, col);
    for (Index r = 0; r < count; ++r) {
      if (r != row) {
        w.row(r) -= w(r, col) * w.row(row);
      }
    }
    ++row;
  }
  v.middleCols(first, count) = w.transpose();
}

} // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m, StateTolerance tol) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidState("density matrix must be square and non-empty");
  }
  if (!all_finite(m)) {
    throw InvalidState("density matrix has non-finite entries");
  }
  const double herm = hermiticity_deviation(m);
  if (herm > tol.hermiticity) {
    throw InvalidState("density matrix is not Hermitian (deviation " + std::to_string(herm) +
                       ")");
  }
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw InvalidState("density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.positivity) {
    throw InvalidState("density matrix is not positive semidefinite (min eigenvalue " +
                       std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> populations) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(populations.size()),
                                        static_cast<Index>(populations.size()));
  for (std::size_t k = 0; k < populations.size(); ++k) {
    m(static_cast<Index>(k), static_cast<Index>(k)) = populations[k];
  }
  return from_matrix(m);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const ComplexVector u = psi.normalized();
  return from_matrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index d) {
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// ---------------------------------------------------------------------------
// Vectorization

Index VectorizedState::dim() const { return isqrt_dim(amplitudes.size(), "VectorizedState"); }

Index SuperOperator::dim() const { return isqrt_dim(matrix.rows(), "SuperOperator"); }

ComplexVector vec(const ComplexMatrix& m) {
  ComplexVector v(m.rows() * m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      v(i * m.cols() + j) = m(i, j);
    }
  }
  return v;
}

ComplexMatrix unvec(const ComplexVector& v) {
  const Index d = isqrt_dim(v.size(), "unvec");
  ComplexMatrix m(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      m(i, j) = v(i * d + j);
    }
  }
  return m;
}

VectorizedState vectorize(const DensityMatrix& rho) { return {vec(rho.matrix()), Stacking::kRow}; }

DensityMatrix devectorize(const VectorizedState& v) {
  return DensityMatrix::from_matrix(unvec(v.amplitudes));
}

// ---------------------------------------------------------------------------
// Generators

SuperOperator build_lindbladian(const ComplexMatrix& h, std::span<const JumpOperator> jumps) {
  if (h.rows() == 0 || h.rows() != h.cols()) {
    throw ShapeMismatch("build_lindbladian: Hamiltonian must be square");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermiticity_deviation(h) > 1e-12 * scale) {
    throw DomainError("build_lindbladian: Hamiltonian is not Hermitian");
  }
  const Index d = h.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const Complex i_unit(0.0, 1.0);

  ComplexMatrix l = -i_unit * (kron(h, id) - kron(id, h.transpose()));
  for (const auto& jump : jumps) {
    if (jump.rate < 0.0) {
      throw NegativeRate("build_lindbladian: negative rate " + std::to_string(jump.rate));
    }
    if (jump.op.rows() != d || jump.op.cols() != d) {
      throw ShapeMismatch("build_lindbladian: jump operator dimension mismatch");
    }
    const ComplexMatrix ada = jump.op.adjoint() * jump.op;
    l += jump.rate * (kron(jump.op, jump.op.conjugate()) -
                      0.5 * (kron(ada, id) + kron(id, ada.transpose())));
  }
  return {std::move(l)};
}

SuperOperator transfer_matrix(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) {
    throw ShapeMismatch("transfer_matrix: empty Kraus list");
  }
  const Index d = kraus.front().rows();
  ComplexMatrix t = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) {
      throw ShapeMismatch("transfer_matrix: Kraus operator dimension mismatch");
    }
    t += kron(k, k.conjugate());
  }
  return {std::move(t)};
}

SuperOperator extract_generator(std::span<const ComplexMatrix> kraus, double t) {
  if (!(t > 0.0)) {
    throw TauOutOfRange("extract_generator: t must be positive, got " + std::to_string(t));
  }
  return {logm_principal(transfer_matrix(kraus).matrix) / t};
}

// ---------------------------------------------------------------------------
// Spectral decomposition

SpectralDecomposition decompose(const SuperOperator& l) {
  l.dim(); // shape check
  const EigenSystem sys = eig_general(l.matrix);
  const Index n = sys.eigenvalues.size();

  const double scale = std::max(1.0, sys.eigenvalues.cwiseAbs().maxCoeff());
  const double tie_tol = 1e-9 * scale;
  const std::vector<Index> order = spectral_order(sys.eigenvalues, tie_tol);

  SpectralDecomposition dec;
  dec.condition_estimate = sys.condition_estimate;
  dec.eigenvalues.resize(n);
  dec.right_modes.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    dec.eigenvalues(k) = sys.eigenvalues(order[static_cast<std::size_t>(k)]);
    dec.right_modes.col(k) = sys.right_vectors.col(order[static_cast<std::size_t>(k)]);
  }

  if (std::abs(dec.eigenvalues(0).real()) > kStationaryTol) {
    throw NoStationaryMode("decompose: smallest |Re lambda| is " +
                           std::to_string(std::abs(dec.eigenvalues(0).real())));
  }

  for (Index first = 0; first < n;) {
    Index last = first + 1;
    while (last < n && std::abs(dec.eigenvalues(last) - dec.eigenvalues(first)) <= tie_tol) {
      ++last;
    }
    if (last - first > 1) {
      canonicalize_cluster(dec.right_modes, first, last - first);
    }
    first = last;
  }

  for (Index k = 0; k < n; ++k) {
    auto col = dec.right_modes.col(k);
    col.normalize();
    // Largest entry real positive; near-ties resolve to the first index.
    const double peak = col.cwiseAbs().maxCoeff();
    Index arg = 0;
    while (std::abs(col(arg)) < peak - 1e-12) {
      ++arg;
    }
    col *= std::conj(col(arg)) / std::abs(col(arg));
  }

  ComplexMatrix stationary = unvec(dec.right_modes.col(0));
  const Complex tr = stationary.trace();
  if (std::abs(tr) < 1e-12) {
    throw NoStationaryMode("decompose: stationary mode has zero trace");
  }
  dec.right_modes.col(0) /= tr;
  stationary /= tr;

  dec.left_modes = dec.right_modes.partialPivLu().inverse();
  const double ortho_err =
      (dec.left_modes * dec.right_modes - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (ortho_err > kBiorthonormalityTol) {
    throw DefectiveMatrix("decompose: biorthonormality error " + std::to_string(ortho_err));
  }

  dec.fixed_point = repaired_state(stationary, "decompose");
  return dec;
}

DensityMatrix propagate_spectral(const SpectralDecomposition& dec, const DensityMatrix& rho0,
                                 double t) {
  if (rho0.dim() * rho0.dim() != dec.size()) {
    throw ShapeMismatch("propagate_spectral: state dimension does not match decomposition");
  }
  if (t < 0.0) {
    throw DomainError("propagate_spectral: negative time");
  }
  if (t == 0.0) {
    return rho0;
  }
  const ComplexVector weights = dec.left_modes * vec(rho0.matrix());
  ComplexVector scaled(weights.size());
  for (Index k = 0; k < weights.size(); ++k) {
    scaled(k) = std::exp(t * dec.eigenvalues(k)) * weights(k);
  }
  return repaired_state(unvec(dec.right_modes * scaled), "propagate_spectral");
}

DensityMatrix propagate_expm(const SuperOperator& l, const DensityMatrix& rho0, double t) {
  if (rho0.dim() * rho0.dim() != l.matrix.rows()) {
    throw ShapeMismatch("propagate_expm: state dimension does not match generator");
  }
  if (t < 0.0) {
    throw DomainError("propagate_expm: negative time");
  }
  const ComplexMatrix prop = expm(t * l.matrix);
  return repaired_state(unvec(prop * vec(rho0.matrix())), "propagate_expm");
}

Complex mode_overlap(const SpectralDecomposition& dec, Index k, const DensityMatrix& rho) {
  if (k < 0 || k >= dec.size()) {
    throw IndexOutOfRange("mode_overlap: mode " + std::to_string(k) + " outside [0, " +
                          std::to_string(dec.size()) + ")");
  }
  if (rho.dim() * rho.dim() != dec.size()) {
    throw ShapeMismatch("mode_overlap: state dimension does not match decomposition");
  }
  return (dec.left_modes.row(k) * vec(rho.matrix()))(0);
}

SuperOperator to_basis(const SuperOperator& l, const ComplexMatrix& basis) {
  const ComplexMatrix s = kron(basis.adjoint(), basis.transpose());
  const ComplexMatrix s_inv = kron(basis, basis.conjugate());
  return {s * l.matrix * s_inv};
}

} // namespace qmpemba
