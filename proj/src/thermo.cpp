#include "qmpemba/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "qmpemba/errors.hpp"

namespace qmpemba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEntropyCutoff = 1e-15;
constexpr double kSingularReferenceTol = 1e-12;
constexpr double kTieTol = 1e-12;

void require_positive_temperature(double t) {
  if (!(t > 0.0)) {
    throw DomainError("temperature must be positive, got " + std::to_string(t));
  }
}

const std::vector<double>& series(const RelaxationTrajectory& tr, Observable obs) {
  return obs == Observable::kFreeEnergy ? tr.f_neq : tr.trace_dist;
}

} // namespace

DensityMatrix gibbs_state(const GibbsSpec& spec) {
  require_positive_temperature(spec.temperature_khz);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(spec.hamiltonian);
  const Eigen::VectorXd& energies = es.eigenvalues();
  const double beta = 1.0 / (kTwoPi * spec.temperature_khz);

  Eigen::VectorXd weights = (-beta * (energies.array() - energies.minCoeff())).exp();
  weights /= weights.sum();
  const ComplexMatrix rho =
      es.eigenvectors() * weights.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix::from_matrix(0.5 * (rho + rho.adjoint()));
}

double equilibrium_free_energy(const GibbsSpec& spec) {
  require_positive_temperature(spec.temperature_khz);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(spec.hamiltonian, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& energies = es.eigenvalues();
  const double beta = 1.0 / (kTwoPi * spec.temperature_khz);
  const double e0 = energies.minCoeff();
  const double log_z = -beta * e0 + std::log((-beta * (energies.array() - e0)).exp().sum());
  return -spec.temperature_khz * log_z;
}

double mean_energy(const DensityMatrix& rho, const ComplexMatrix& h) {
  return (h * rho.matrix()).trace().real() / kTwoPi;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double p : rho.eigenvalues()) {
    if (p > kEntropyCutoff) {
      s -= p * std::log(p);
    }
  }
  return s;
}

double f_neq(const DensityMatrix& rho, const ComplexMatrix& h, double temperature_khz) {
  require_positive_temperature(temperature_khz);
  return mean_energy(rho, h) - temperature_khz * von_neumann_entropy(rho);
}

double kl_divergence(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw ShapeMismatch("kl_divergence: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sigma.matrix());
  if (es.eigenvalues().minCoeff() <= kSingularReferenceTol) {
    throw SingularReference("kl_divergence: reference state is not full rank");
  }
  const ComplexMatrix log_sigma = es.eigenvectors() *
                                  es.eigenvalues().array().log().matrix().cast<Complex>().asDiagonal() *
                                  es.eigenvectors().adjoint();
  const double cross = (rho.matrix() * log_sigma).trace().real();
  return -von_neumann_entropy(rho) - cross;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw ShapeMismatch("trace_distance: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix() - sigma.matrix(),
                                                  Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix passive_state(const DensityMatrix& rho, const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> energy(h);
  Eigen::VectorXd pops = rho.eigenvalues(); // ascending
  std::reverse(pops.begin(), pops.end());
  const ComplexMatrix m =
      energy.eigenvectors() * pops.cast<Complex>().asDiagonal() * energy.eigenvectors().adjoint();
  return DensityMatrix::from_matrix(0.5 * (m + m.adjoint()));
}

void RelaxationTrajectory::check() const {
  const std::size_t n = times.size();
  if (states.size() != n || f_neq.size() != n || delta_f_neq.size() != n ||
      trace_dist.size() != n) {
    throw GridMismatch("trajectory '" + label + "': field lengths disagree");
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (!(times[k] > times[k - 1])) {
      throw GridMismatch("trajectory '" + label + "': times not strictly ascending");
    }
  }
}

CrossingReport detect_crossing(const RelaxationTrajectory& a, const RelaxationTrajectory& b,
                               Observable observable) {
  a.check();
  b.check();
  if (a.times.size() != b.times.size()) {
    throw GridMismatch("detect_crossing: trajectories have different grid sizes");
  }
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12) {
      throw GridMismatch("detect_crossing: time grids differ at index " + std::to_string(k));
    }
  }

  const auto& ya = series(a, observable);
  const auto& yb = series(b, observable);
  const std::size_t n = ya.size();
  auto sign = [](double d) { return d > kTieTol ? 1 : (d < -kTieTol ? -1 : 0); };

  CrossingReport report;
  std::size_t last = n;
  int last_sign = 0;
  std::size_t after = n; // first grid index past the crossing
  for (std::size_t k = 0; k < n; ++k) {
    const double d = ya[k] - yb[k];
    const int s = sign(d);
    if (s == 0) {
      continue;
    }
    if (last_sign != 0 && s != last_sign) {
      const double d0 = ya[last] - yb[last];
      const double frac = d0 / (d0 - d);
      report.exists = true;
      report.t_cross = a.times[last] + frac * (a.times[k] - a.times[last]);
      after = k;
      break;
    }
    last = k;
    last_sign = s;
  }
  if (!report.exists) {
    return report;
  }

  bool strictly_below = false;
  bool never_above = true;
  for (std::size_t k = after; k < n; ++k) {
    const double d = ya[k] - yb[k];
    never_above = never_above && d <= kTieTol;
    strictly_below = strictly_below || d < -kTieTol;
  }
  report.persistent = never_above && strictly_below;
  return report;
}

} // namespace qmpemba
