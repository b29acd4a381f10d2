#include "qmpemba/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmpemba/errors.hpp"
#include "qmpemba/operators.hpp"

namespace qmpemba {

namespace {

constexpr double kGadTol = 1e-10;
constexpr double kDaviesTol = 1e-9;

} // namespace

double ThermalEnvironment::excited_population() const {
  const double boltzmann = std::exp(-2.0 * gap_khz / temperature_khz);
  return boltzmann / (1.0 + boltzmann);
}

ComplexMatrix ThermalEnvironment::hamiltonian() const {
  return ops::qubit_hamiltonian(gap_khz, ops::PauliAxis::kZ);
}

double full_swap_time_ms(double j_hz) { return 1.0 / (2.0 * j_hz * 1e-3); }

KrausChannel build_heat_exchange(const ThermalEnvironment& env, double j_hz, double tau_ms) {
  if (!(j_hz > 0.0)) {
    throw DomainError("build_heat_exchange: coupling must be positive");
  }
  const double tau_max = full_swap_time_ms(j_hz);
  if (!(tau_ms >= 0.0) || tau_ms > tau_max * (1.0 + 1e-12)) {
    throw TauOutOfRange("build_heat_exchange: tau = " + std::to_string(tau_ms) +
                        " ms outside [0, " + std::to_string(tau_max) + "]");
  }
  const double p = env.excited_population();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("build_heat_exchange: auxiliary population outside [0, 1]");
  }

  const double angle = std::numbers::pi * j_hz * 1e-3 * std::min(tau_ms, tau_max);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double a = std::sqrt(1.0 - p);
  const double b = std::sqrt(p);

  ComplexMatrix k1(2, 2), k2(2, 2), k3(2, 2), k4(2, 2);
  k1 << a, 0.0, 0.0, a * c;
  k2 << 0.0, a * s, 0.0, 0.0;
  k3 << b * c, 0.0, 0.0, b;
  k4 << 0.0, 0.0, -b * s, 0.0;

  KrausChannel ch;
  ch.operators = {k1, k2, k3, k4};
  ch.labels = {"K1", "K2", "K3", "K4"};
  ch.tau_ms = tau_ms;
  ch.p_aux = p;
  ch.coupling_hz = j_hz;
  return ch;
}

KrausChannel rotate_channel(const KrausChannel& ch, const ComplexMatrix& basis) {
  KrausChannel out = ch;
  for (auto& k : out.operators) {
    k = basis * k * basis.adjoint();
  }
  return out;
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  const Index d = rho.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& k : ch.operators) {
    if (k.rows() != d || k.cols() != d) {
      throw ShapeMismatch("apply_channel: Kraus operator dimension mismatch");
    }
    out += k * rho.matrix() * k.adjoint();
  }
  return DensityMatrix::from_matrix(out, {1e-12, 1e-12, 1e-12});
}

double completeness_error(const KrausChannel& ch) {
  const Index d = ch.operators.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : ch.operators) {
    sum += k.adjoint() * k;
  }
  return (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

ComplexMatrix choi_matrix(const KrausChannel& ch) {
  const Index d = ch.operators.front().rows();
  ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(d, d);
      unit(i, j) = 1.0;
      ComplexMatrix image = ComplexMatrix::Zero(d, d);
      for (const auto& k : ch.operators) {
        image += k * unit * k.adjoint();
      }
      choi.block(i * d, j * d, d, d) = image;
    }
  }
  return choi;
}

GadReport verify_gad_equivalence(const KrausChannel& ch) {
  auto act = [&](const ComplexMatrix& rho) {
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (const auto& k : ch.operators) {
      out += k * rho * k.adjoint();
    }
    return out;
  };

  const ComplexVector zero = ComplexVector::Unit(2, 0);
  const ComplexVector one = ComplexVector::Unit(2, 1);
  ComplexVector plus(2), plus_i(2);
  plus << 1.0, 1.0;
  plus_i << 1.0, Complex(0.0, 1.0);
  plus /= std::sqrt(2.0);
  plus_i /= std::sqrt(2.0);

  const std::vector<ComplexMatrix> inputs = {zero * zero.adjoint(), one * one.adjoint(),
                                             plus * plus.adjoint(), plus_i * plus_i.adjoint()};

  GadReport report;
  const double from_ground = act(inputs[0])(1, 1).real();
  const double from_excited = act(inputs[1])(1, 1).real();
  report.eta = 1.0 - (from_excited - from_ground);
  report.p = report.eta > 1e-12 ? from_ground / report.eta : ch.p_aux;

  auto model = [&](const ComplexMatrix& rho) {
    ComplexMatrix out(2, 2);
    const Complex excited = (1.0 - report.eta) * rho(1, 1) + report.eta * report.p;
    out(1, 1) = excited;
    out(0, 0) = rho.trace() - excited;
    const double damp = std::sqrt(std::max(0.0, 1.0 - report.eta));
    out(0, 1) = damp * rho(0, 1);
    out(1, 0) = damp * rho(1, 0);
    return out;
  };

  for (const auto& rho : inputs) {
    report.max_deviation =
        std::max(report.max_deviation, (act(rho) - model(rho)).cwiseAbs().maxCoeff());
  }
  report.pass = report.max_deviation < kGadTol;
  return report;
}

DaviesReport verify_davies_blocks(const SuperOperator& gen, const ComplexMatrix& energy_basis) {
  const SuperOperator local = to_basis(gen, energy_basis);
  const Index d = gen.dim();
  auto is_population = [d](Index idx) { return idx / d == idx % d; };

  DaviesReport report;
  for (Index r = 0; r < local.matrix.rows(); ++r) {
    for (Index c = 0; c < local.matrix.cols(); ++c) {
      if (is_population(r) != is_population(c)) {
        report.max_coupling = std::max(report.max_coupling, std::abs(local.matrix(r, c)));
      }
    }
  }
  report.pass = report.max_coupling < kDaviesTol;
  return report;
}

SuperOperator extract_generator(const KrausChannel& ch, double t) {
  return extract_generator(std::span<const ComplexMatrix>(ch.operators), t);
}

} // namespace qmpemba
