#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "qmpemba/channels.hpp"
#include "qmpemba/errors.hpp"
#include "qmpemba/operators.hpp"
#include "qmpemba/thermo.hpp"

using namespace qmpemba;

namespace {

constexpr double kJ = 215.1;
const Complex I{0.0, 1.0};

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityMatrix random_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double x, y, z;
  do {
    x = u(rng);
    y = u(rng);
    z = u(rng);
  } while (x * x + y * y + z * z > 0.99);
  return DensityMatrix::from_matrix(
      0.5 * (ops::identity() + x * ops::sigma_x() + y * ops::sigma_y() + z * ops::sigma_z()));
}

// System (x) auxiliary partial swap, auxiliary traced out afterwards.
DensityMatrix dilated_exchange(const DensityMatrix& rho, double p, double j_hz, double tau_ms) {
  const double theta = std::numbers::pi * j_hz * 1e-3 * tau_ms;
  // Exchange unitary on span{|01>, |10>} (system first), identity elsewhere.
  ComplexMatrix u = ComplexMatrix::Identity(4, 4);
  u(1, 1) = std::cos(theta);
  u(2, 2) = std::cos(theta);
  u(1, 2) = std::sin(theta);
  u(2, 1) = -std::sin(theta);
  ComplexMatrix aux = ComplexMatrix::Zero(2, 2);
  aux(0, 0) = 1.0 - p;
  aux(1, 1) = p;
  const ComplexMatrix joint = u * kron(rho.matrix(), aux) * u.adjoint();
  ComplexMatrix reduced = ComplexMatrix::Zero(2, 2);
  for (Index i = 0; i < 2; ++i) {
    for (Index k = 0; k < 2; ++k) {
      for (Index a = 0; a < 2; ++a) {
        reduced(i, k) += joint(2 * i + a, 2 * k + a);
      }
    }
  }
  return DensityMatrix::from_matrix(reduced);
}

} // namespace

TEST_CASE("thermal environment populations") {
  const ThermalEnvironment env;
  CHECK(env.excited_population() == doctest::Approx(0.301835).epsilon(1e-5));
  CHECK(max_abs(env.hamiltonian() - ops::qubit_hamiltonian(2.0, ops::PauliAxis::kZ)) == 0.0);
  const ThermalEnvironment cold{1e-3, 2.0};
  CHECK(cold.excited_population() < 1e-12);
}

TEST_CASE("full swap time") {
  CHECK(full_swap_time_ms(kJ) == doctest::Approx(2.32450).epsilon(1e-5));
  CHECK(full_swap_time_ms(500.0) == doctest::Approx(1.0));
}

TEST_CASE("tau = 0 is the identity channel") {
  const KrausChannel ch = build_heat_exchange(ThermalEnvironment{}, kJ, 0.0);
  CHECK(ch.operators.size() == 4);
  CHECK(ch.labels.front() == "K1");
  CHECK(max_abs(ch.transfer().matrix - ComplexMatrix::Identity(4, 4)) < 1e-15);
}

TEST_CASE("full swap replaces the state by the auxiliary populations") {
  const ThermalEnvironment env;
  const double p = env.excited_population();
  const KrausChannel ch = build_heat_exchange(env, kJ, full_swap_time_ms(kJ));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix out = apply_channel(ch, random_qubit(rng));
    CHECK(out(0, 0).real() == doctest::Approx(1.0 - p).epsilon(1e-12));
    CHECK(out(1, 1).real() == doctest::Approx(p).epsilon(1e-12));
    CHECK(std::abs(out(0, 1)) < 1e-12);
  }
}

TEST_CASE("tau outside [0, (2J)^-1] is rejected") {
  const ThermalEnvironment env;
  CHECK_THROWS_AS(build_heat_exchange(env, kJ, -0.01), TauOutOfRange);
  CHECK_THROWS_AS(build_heat_exchange(env, kJ, full_swap_time_ms(kJ) + 0.01), TauOutOfRange);
}

TEST_CASE("Kraus form matches the two-qubit exchange dilation") {
  const ThermalEnvironment env;
  std::mt19937_64 rng(2);
  for (double tau : uniform_grid(0.0, full_swap_time_ms(kJ), 12)) {
    const KrausChannel ch = build_heat_exchange(env, kJ, tau);
    const DensityMatrix rho = random_qubit(rng);
    const DensityMatrix direct = apply_channel(ch, rho);
    const DensityMatrix dilated = dilated_exchange(rho, env.excited_population(), kJ, tau);
    CHECK(max_abs(direct.matrix() - dilated.matrix()) < 1e-12);
  }
}

TEST_CASE("CPTP on a 50-point tau grid") {
  const ThermalEnvironment env;
  for (double tau : uniform_grid(0.0, full_swap_time_ms(kJ), 50)) {
    const KrausChannel ch = build_heat_exchange(env, kJ, tau);
    CHECK(completeness_error(ch) <= 1e-12);
    const ComplexMatrix choi = choi_matrix(ch);
    CHECK(max_abs(choi - choi.adjoint()) < 1e-14);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(choi, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    // Partial trace of the Choi matrix over the output is the identity.
    const ComplexMatrix block00 = choi.block(0, 0, 2, 2);
    const ComplexMatrix block11 = choi.block(2, 2, 2, 2);
    CHECK(std::abs(block00.trace() - 1.0) < 1e-12);
    CHECK(std::abs(block11.trace() - 1.0) < 1e-12);
  }
}

TEST_CASE("transfer matrix acts like the Kraus sum") {
  const ThermalEnvironment env;
  std::mt19937_64 rng(3);
  const KrausChannel ch = build_heat_exchange(env, kJ, 0.8);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix rho = random_qubit(rng);
    const ComplexMatrix via_transfer = unvec(ch.transfer().matrix * vec(rho.matrix()));
    CHECK(max_abs(via_transfer - apply_channel(ch, rho).matrix()) < 1e-14);
  }
}

TEST_CASE("generalized amplitude damping equivalence") {
  const ThermalEnvironment env;
  SUBCASE("tau = 0 gives eta = 0") {
    const GadReport r = verify_gad_equivalence(build_heat_exchange(env, kJ, 0.0));
    CHECK(r.pass);
    CHECK(r.eta == doctest::Approx(0.0));
  }
  SUBCASE("full swap gives eta = 1") {
    const GadReport r =
        verify_gad_equivalence(build_heat_exchange(env, kJ, full_swap_time_ms(kJ)));
    CHECK(r.pass);
    CHECK(r.eta == doctest::Approx(1.0));
    CHECK(r.p == doctest::Approx(env.excited_population()));
  }
  SUBCASE("quarter period gives eta = 1/2") {
    const GadReport r =
        verify_gad_equivalence(build_heat_exchange(env, kJ, 0.5 * full_swap_time_ms(kJ)));
    CHECK(r.pass);
    CHECK(r.eta == doctest::Approx(0.5));
    CHECK(r.max_deviation < 1e-10);
  }
  SUBCASE("eta = sin^2(pi J tau) everywhere") {
    for (double tau : uniform_grid(0.0, full_swap_time_ms(kJ), 20)) {
      const GadReport r = verify_gad_equivalence(build_heat_exchange(env, kJ, tau));
      const double s = std::sin(std::numbers::pi * kJ * 1e-3 * tau);
      CHECK(r.pass);
      CHECK(r.eta == doctest::Approx(s * s).epsilon(1e-12));
    }
  }
}

TEST_CASE("a channel with an extra unitary kick is not generalized amplitude damping") {
  KrausChannel ch = build_heat_exchange(ThermalEnvironment{}, kJ, 0.7);
  const ComplexMatrix u = expm(-I * 0.3 * ops::sigma_x());
  for (auto& k : ch.operators) {
    k = u * k;
  }
  CHECK_FALSE(verify_gad_equivalence(ch).pass);
}

TEST_CASE("Davies block structure") {
  const ThermalEnvironment env;
  const KrausChannel ch = build_heat_exchange(env, kJ, 1.0);
  const SuperOperator gen = extract_generator(ch, 1.0);
  CHECK(verify_davies_blocks(gen, ops::identity()).pass);

  SUBCASE("a transverse Hamiltonian term couples the blocks") {
    const std::array<JumpOperator, 0> none{};
    SuperOperator kicked = gen;
    kicked.matrix += build_lindbladian(0.4 * ops::sigma_x(), none).matrix;
    const DaviesReport r = verify_davies_blocks(kicked, ops::identity());
    CHECK_FALSE(r.pass);
    CHECK(r.max_coupling > 0.1);
  }
  SUBCASE("in the wrong basis the structure is lost") {
    ComplexMatrix w(2, 2);
    w << 1.0, 1.0, 1.0, -1.0;
    w /= std::sqrt(2.0);
    CHECK_FALSE(verify_davies_blocks(gen, w).pass);
  }
}

TEST_CASE("rotate_channel conjugates the action") {
  const ThermalEnvironment env;
  const KrausChannel ch = build_heat_exchange(env, kJ, 1.2);
  ComplexMatrix w(2, 2);
  w << 1.0, 1.0, 1.0, -1.0;
  w /= std::sqrt(2.0);
  const KrausChannel rotated = rotate_channel(ch, w);
  CHECK(completeness_error(rotated) < 1e-14);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    const DensityMatrix rho = random_qubit(rng);
    const DensityMatrix inner = DensityMatrix::from_matrix(w.adjoint() * rho.matrix() * w);
    const ComplexMatrix expected = w * apply_channel(ch, inner).matrix() * w.adjoint();
    CHECK(max_abs(apply_channel(rotated, rho).matrix() - expected) < 1e-14);
  }
}

TEST_CASE("trace distance to the fixed point shrinks monotonically in tau") {
  const ThermalEnvironment env;
  const DensityMatrix gibbs = gibbs_state({env.hamiltonian(), env.temperature_khz});
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix rho = random_qubit(rng);
    double previous = trace_distance(rho, gibbs);
    for (double tau : uniform_grid(0.0, full_swap_time_ms(kJ), 40)) {
      const double d = trace_distance(apply_channel(build_heat_exchange(env, kJ, tau), rho), gibbs);
      CHECK(d <= previous + 1e-12);
      previous = d;
    }
    CHECK(previous < 1e-12);
  }
}

TEST_CASE("channel composition: transfer matrices multiply like the maps") {
  const ThermalEnvironment env;
  const KrausChannel a = build_heat_exchange(env, kJ, 0.4);
  const KrausChannel b = build_heat_exchange(env, kJ, 0.9);
  std::mt19937_64 rng(6);
  const DensityMatrix rho = random_qubit(rng);
  const ComplexMatrix seq = apply_channel(b, apply_channel(a, rho)).matrix();
  const ComplexMatrix via = unvec(b.transfer().matrix * a.transfer().matrix * vec(rho.matrix()));
  CHECK(max_abs(seq - via) < 1e-14);
  // Two partial exchanges compose to damping with c_a^2 c_b^2 on the populations.
  const double ca = std::cos(std::numbers::pi * kJ * 1e-3 * 0.4);
  const double cb = std::cos(std::numbers::pi * kJ * 1e-3 * 0.9);
  const double p = env.excited_population();
  const double expected_excited = p + (rho(1, 1).real() - p) * ca * ca * cb * cb;
  CHECK(seq(1, 1).real() == doctest::Approx(expected_excited).epsilon(1e-12));
}
