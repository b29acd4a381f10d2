#include <numbers>

#include <benchmark/benchmark.h>

#include "qmpemba/mpemba.hpp"
#include "qmpemba/otto.hpp"

using namespace qmpemba;

namespace {

constexpr double kJ = 215.1;

struct SurfaceInputs {
  ThermalEnvironment env;
  ThetaFamily family;
  std::vector<double> taus;
  ChannelBuilder builder;

  explicit SurfaceInputs(std::size_t n)
      : family(build_theta_family(x_basis_state(0.3, 0.7),
                                  uniform_grid(0.0, 2.0 * std::numbers::pi, n))),
        taus(uniform_grid(0.0, full_swap_time_ms(kJ), n)),
        builder([e = env](double tau) { return build_heat_exchange(e, kJ, tau); }) {}
};

void BM_SurfaceSerial(benchmark::State& state) {
  const SurfaceInputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(free_energy_surface_serial(in.family, in.builder, in.taus,
                                                        in.env.hamiltonian(),
                                                        in.env.temperature_khz));
  }
}

void BM_SurfaceParallel(benchmark::State& state) {
  const SurfaceInputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(free_energy_surface(in.family, in.builder, in.taus,
                                                 in.env.hamiltonian(), in.env.temperature_khz));
  }
}

void BM_DistanceSerial(benchmark::State& state) {
  const CycleConfig cfg;
  const auto grid = uniform_grid(0.0, cfg.tau2_max_ms(), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(distance_curves_serial(cfg, grid));
  }
}

void BM_DistanceParallel(benchmark::State& state) {
  const CycleConfig cfg;
  const auto grid = uniform_grid(0.0, cfg.tau2_max_ms(), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(distance_curves(cfg, grid));
  }
}

void BM_RatioSerial(benchmark::State& state) {
  const CycleConfig cfg;
  const auto curves = distance_curves(cfg, uniform_grid(0.0, cfg.tau2_max_ms(), 4096));
  const auto deltas = default_delta_grid(qme_window(curves), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_ratio_serial(curves, cfg, deltas));
  }
}

void BM_RatioParallel(benchmark::State& state) {
  const CycleConfig cfg;
  const auto curves = distance_curves(cfg, uniform_grid(0.0, cfg.tau2_max_ms(), 4096));
  const auto deltas = default_delta_grid(qme_window(curves), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_ratio(curves, cfg, deltas));
  }
}

} // namespace

BENCHMARK(BM_SurfaceSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SurfaceParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceSerial)->Arg(64)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceParallel)->Arg(64)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RatioSerial)->Arg(40)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RatioParallel)->Arg(40)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
