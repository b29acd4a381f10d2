#include "qmpemba/mpemba.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qmpemba/detail/parallel.hpp"
#include "qmpemba/errors.hpp"
#include "qmpemba/operators.hpp"

namespace qmpemba {

namespace {

void fix_column_phases(ComplexMatrix& m) {
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      const double mag = std::abs(m(r, c));
      if (mag > 1e-12) {
        m.col(c) *= std::conj(m(r, c)) / mag;
        break;
      }
    }
  }
}

DensityMatrix conjugate_state(const ComplexMatrix& u, const DensityMatrix& rho) {
  const ComplexMatrix m = u * rho.matrix() * u.adjoint();
  return DensityMatrix::from_matrix(0.5 * (m + m.adjoint()));
}

std::vector<SurfacePoint> surface_row(const DensityMatrix& state, double theta,
                                      const ChannelBuilder& builder,
                                      std::span<const double> tau_grid, const ComplexMatrix& h,
                                      double temperature_khz, double f_eq) {
  std::vector<SurfacePoint> row;
  row.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const DensityMatrix evolved = apply_channel(builder(tau), state);
    const double f = f_neq(evolved, h, temperature_khz);
    row.push_back({theta, tau, f, f - f_eq});
  }
  return row;
}

} // namespace

MpembaTransform mpemba_unitary(const DensityMatrix& rho, const ComplexMatrix& h,
                               double temperature_khz) {
  if (h.rows() != rho.dim() || h.cols() != rho.dim()) {
    throw ShapeMismatch("mpemba_unitary: Hamiltonian and state dimensions differ");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> energy(h);
  const Eigen::VectorXd& levels = energy.eigenvalues();
  const double scale = std::max(1.0, levels.cwiseAbs().maxCoeff());
  for (Index k = 1; k < levels.size(); ++k) {
    if (levels(k) - levels(k - 1) <= 1e-12 * scale) {
      throw DegenerateHamiltonian("mpemba_unitary: Hamiltonian has a degenerate level");
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> populations(rho.matrix());

  ComplexMatrix energy_vectors = energy.eigenvectors();
  ComplexMatrix state_vectors = populations.eigenvectors();
  fix_column_phases(energy_vectors);
  fix_column_phases(state_vectors);

  MpembaTransform out;
  out.unitary = energy_vectors * state_vectors.adjoint();
  out.source_state = rho;
  out.target_state = conjugate_state(out.unitary, rho);
  out.f_neq_gain = f_neq(out.target_state, h, temperature_khz) - f_neq(rho, h, temperature_khz);
  return out;
}

MpembaTransform mpemba_unitary(const DensityMatrix& rho, const ComplexMatrix& h,
                               double temperature_khz, const SpectralDecomposition& generator) {
  MpembaTransform out = mpemba_unitary(rho, h, temperature_khz);
  out.slow_overlap_before = mode_overlap(generator, 1, out.source_state);
  out.slow_overlap_after = mode_overlap(generator, 1, out.target_state);
  return out;
}

DensityMatrix x_basis_state(double p_plus, double p_minus) {
  ComplexMatrix m(2, 2);
  m << 0.5 * (p_plus + p_minus), 0.5 * (p_plus - p_minus), 0.5 * (p_plus - p_minus),
      0.5 * (p_plus + p_minus);
  return DensityMatrix::from_matrix(m);
}

ComplexMatrix rotation_y(double theta) {
  return std::cos(0.5 * theta) * ops::identity() -
         Complex(0.0, 1.0) * std::sin(0.5 * theta) * ops::sigma_y();
}

ThetaFamily build_theta_family(const DensityMatrix& base, std::span<const double> theta_grid) {
  if (base.dim() != 2) {
    throw ShapeMismatch("build_theta_family: qubit state required");
  }
  ThetaFamily family;
  family.base_state = base;
  family.angles.assign(theta_grid.begin(), theta_grid.end());
  family.rotated_states.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    if (!std::isfinite(theta)) {
      throw DomainError("build_theta_family: non-finite angle");
    }
    family.rotated_states.push_back(conjugate_state(rotation_y(theta), base));
  }
  return family;
}

std::vector<SurfacePoint> free_energy_surface(const ThetaFamily& family,
                                              const ChannelBuilder& channel_builder,
                                              std::span<const double> tau_grid,
                                              const ComplexMatrix& h, double temperature_khz) {
  const double f_eq = equilibrium_free_energy({h, temperature_khz});
  const std::size_t n_theta = family.angles.size();
  const std::size_t n_tau = tau_grid.size();
  std::vector<SurfacePoint> table(n_theta * n_tau);

  detail::parallel_for(n_theta, [&](std::size_t i) {
    auto row = surface_row(family.rotated_states[i], family.angles[i], channel_builder, tau_grid,
                           h, temperature_khz, f_eq);
    std::copy(row.begin(), row.end(), table.begin() + static_cast<std::ptrdiff_t>(i * n_tau));
  });
  return table;
}

std::vector<SurfacePoint> free_energy_surface_serial(const ThetaFamily& family,
                                                     const ChannelBuilder& channel_builder,
                                                     std::span<const double> tau_grid,
                                                     const ComplexMatrix& h,
                                                     double temperature_khz) {
  const double f_eq = equilibrium_free_energy({h, temperature_khz});
  std::vector<SurfacePoint> table;
  table.reserve(family.angles.size() * tau_grid.size());
  for (std::size_t i = 0; i < family.angles.size(); ++i) {
    auto row = surface_row(family.rotated_states[i], family.angles[i], channel_builder, tau_grid,
                           h, temperature_khz, f_eq);
    table.insert(table.end(), row.begin(), row.end());
  }
  return table;
}

std::optional<double> equilibration_time(std::span<const double> tau_grid,
                                         std::span<const double> delta_f_neq, double epsilon_khz) {
  if (tau_grid.size() != delta_f_neq.size()) {
    throw GridMismatch("equilibration_time: grid and values differ in length");
  }
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    if (delta_f_neq[k] <= epsilon_khz) {
      if (k == 0) {
        return tau_grid[0];
      }
      const double d0 = delta_f_neq[k - 1] - epsilon_khz;
      const double d1 = delta_f_neq[k] - epsilon_khz;
      return tau_grid[k - 1] + (tau_grid[k] - tau_grid[k - 1]) * d0 / (d0 - d1);
    }
  }
  return std::nullopt;
}

RelaxationTrajectory cooling_curves(const DensityMatrix& rho0, const ThermalEnvironment& env,
                                    double j_hz, std::span<const double> tau_grid,
                                    bool with_mpemba) {
  const ComplexMatrix h = env.hamiltonian();
  const GibbsSpec spec{h, env.temperature_khz};
  const DensityMatrix gibbs = gibbs_state(spec);
  const double f_eq = equilibrium_free_energy(spec);

  const DensityMatrix start =
      with_mpemba ? mpemba_unitary(rho0, h, env.temperature_khz).target_state : rho0;

  RelaxationTrajectory tr;
  tr.label = with_mpemba ? "mb" : "rho0";
  for (double tau : tau_grid) {
    DensityMatrix state = apply_channel(build_heat_exchange(env, j_hz, tau), start);
    const double f = f_neq(state, h, env.temperature_khz);
    tr.times.push_back(tau);
    tr.f_neq.push_back(f);
    tr.delta_f_neq.push_back(f - f_eq);
    tr.trace_dist.push_back(trace_distance(state, gibbs));
    tr.states.push_back(std::move(state));
  }
  tr.check();
  return tr;
}

} // namespace qmpemba
