#include "qmpemba/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "qmpemba/channels.hpp"
#include "qmpemba/errors.hpp"
#include "qmpemba/mpemba.hpp"
#include "qmpemba/operators.hpp"
#include "qmpemba/otto.hpp"
#include "qmpemba/thermo.hpp"

namespace qmpemba {

namespace {

constexpr const char* kDefaultConfigPath = "mpemba.ini";
constexpr const char* kConfigEnv = "MPEMBA_CONFIG";

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::vector<double> populations;
  bool no_mpemba = false;
  std::optional<int> tau_steps;
  std::optional<int> theta_steps;
  double tau_ms = 1.0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig resolve_config(const Options& opt, std::ostream& err) {
  std::string path = opt.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
      path = env;
    } else if (std::filesystem::exists(kDefaultConfigPath)) {
      path = kDefaultConfigPath;
    }
  }
  ExperimentConfig cfg;
  if (!path.empty()) {
    err << "config: " << path << '\n';
    cfg = parse_config_unvalidated(read_file(path));
  }
  if (!opt.populations.empty()) {
    cfg.populations = {opt.populations.at(0), opt.populations.at(1)};
  }
  if (opt.no_mpemba) {
    cfg.use_mpemba = false;
  }
  if (opt.tau_steps) {
    cfg.tau_steps = *opt.tau_steps;
  }
  if (opt.theta_steps) {
    cfg.theta_steps = *opt.theta_steps;
  }
  return cfg;
}

ThermalEnvironment hot_environment(const ExperimentConfig& cfg) {
  return {cfg.t_hot_khz, cfg.nu1_khz};
}

std::vector<double> tau_grid(const ExperimentConfig& cfg) {
  return uniform_grid(0.0, full_swap_time_ms(cfg.j_hz), static_cast<std::size_t>(cfg.tau_steps));
}

TableFormat table_format(const Options& opt) {
  return opt.format == "json" ? TableFormat::kJson : TableFormat::kCsv;
}

void emit(const Table& table, const Options& opt, const ExperimentConfig& cfg,
          const std::string& stem, std::ostream& err) {
  std::string path = opt.out_path;
  if (path.empty()) {
    path = stem + (table_format(opt) == TableFormat::kJson ? ".json" : ".csv");
  }
  write_table(table, path, table_format(opt), cfg.output_precision);
  err << "wrote " << table.rows.size() << " rows to " << path << '\n';
}

std::string num(double v) { return format_double(v, 6); }

// ---- subcommands ----------------------------------------------------------

int cmd_spectrum(const Options& opt, const ExperimentConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  const ThermalEnvironment env = hot_environment(cfg);
  const KrausChannel ch = build_heat_exchange(env, cfg.j_hz, opt.tau_ms);
  const SpectralDecomposition dec = decompose(extract_generator(ch, opt.tau_ms));

  Table table{{"k", "re_per_ms", "im_per_ms", "kind"}, {}};
  out << "spectrum at tau = " << num(opt.tau_ms) << " ms\n";
  for (Index k = 0; k < dec.size(); ++k) {
    const auto mode = dec.right_modes.col(k);
    const double pop = std::norm(mode(0)) + std::norm(mode(3));
    const double coh = std::norm(mode(1)) + std::norm(mode(2));
    const char* kind = k == 0 ? "stationary" : (pop >= coh ? "population" : "coherence");
    const Complex lambda = dec.eigenvalues(k);
    out << "  lambda_" << k + 1 << " = " << num(lambda.real()) << " + " << num(lambda.imag())
        << "i  (" << kind << ")\n";
    table.rows.push_back({static_cast<long long>(k + 1), lambda.real(), lambda.imag(),
                          std::string(kind)});
  }
  out << "fixed point populations: " << num(dec.fixed_point(0, 0).real()) << ", "
      << num(dec.fixed_point(1, 1).real()) << '\n';
  if (!opt.out_path.empty()) {
    emit(table, opt, cfg, "spectrum", err);
  }
  return kExitOk;
}

int cmd_surface(const Options& opt, const ExperimentConfig& cfg, std::ostream& out,
                std::ostream& err) {
  const ThermalEnvironment env = hot_environment(cfg);
  const auto thetas = uniform_grid(0.0, 2.0 * std::numbers::pi,
                                   static_cast<std::size_t>(cfg.theta_steps));
  const auto taus = tau_grid(cfg);
  const ThetaFamily family =
      build_theta_family(x_basis_state(cfg.populations[0], cfg.populations[1]), thetas);
  const double j = cfg.j_hz;
  const auto surface = free_energy_surface(
      family, [&env, j](double tau) { return build_heat_exchange(env, j, tau); }, taus,
      env.hamiltonian(), env.temperature_khz);

  Table table{{"theta_rad", "tau_ms", "delta_f_neq_khz"}, {}};
  table.rows.reserve(surface.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < surface.size(); ++k) {
    const auto& p = surface[k];
    table.rows.push_back({p.theta, p.tau_ms, p.delta_f_neq});
    if (p.tau_ms == 0.0 && p.delta_f_neq < surface[best].delta_f_neq) {
      best = k;
    }
  }
  emit(table, opt, cfg, "surface", err);
  out << "surface: " << thetas.size() << " x " << taus.size()
      << " grid; lowest initial delta_f_neq " << num(surface[best].delta_f_neq)
      << " kHz at theta = " << num(surface[best].theta) << " rad\n";
  return kExitOk;
}

int cmd_cooling(const Options& opt, const ExperimentConfig& cfg, std::ostream& out,
                std::ostream& err) {
  const ThermalEnvironment env = hot_environment(cfg);
  const auto taus = tau_grid(cfg);
  const DensityMatrix rho0 = x_basis_state(cfg.populations[0], cfg.populations[1]);
  const auto plain = cooling_curves(rho0, env, cfg.j_hz, taus, false);

  const auto eq_time = [&](const RelaxationTrajectory& tr) {
    const auto t = equilibration_time(tr.times, tr.delta_f_neq, cfg.epsilon_equilibrium_khz);
    return t ? num(*t) + " ms" : std::string("not reached");
  };

  if (!cfg.use_mpemba) {
    Table table{{"tau_ms", "delta_f_neq_rho0_khz", "trace_distance_rho0"}, {}};
    for (std::size_t k = 0; k < taus.size(); ++k) {
      table.rows.push_back({taus[k], plain.delta_f_neq[k], plain.trace_dist[k]});
    }
    emit(table, opt, cfg, "cooling", err);
    out << "cooling: Mpemba step disabled; delta_f_neq(0) = " << num(plain.delta_f_neq.front())
        << " kHz; equilibration time " << eq_time(plain) << '\n';
    return kExitOk;
  }

  const auto mb = cooling_curves(rho0, env, cfg.j_hz, taus, true);
  Table table{{"tau_ms", "delta_f_neq_rho0_khz", "delta_f_neq_mb_khz", "trace_distance_rho0",
               "trace_distance_mb"},
              {}};
  for (std::size_t k = 0; k < taus.size(); ++k) {
    table.rows.push_back(
        {taus[k], plain.delta_f_neq[k], mb.delta_f_neq[k], plain.trace_dist[k], mb.trace_dist[k]});
  }
  emit(table, opt, cfg, "cooling", err);

  const CrossingReport crossing = detect_crossing(mb, plain, Observable::kFreeEnergy);
  out << "cooling: ";
  if (crossing.exists) {
    out << "crossing detected, " << (crossing.persistent ? "persistent" : "not persistent")
        << ", t_cross = " << num(crossing.t_cross) << " ms";
  } else {
    out << "no crossing";
  }
  out << "; delta_f_neq(0): rho0 " << num(plain.delta_f_neq.front()) << " kHz, mb "
      << num(mb.delta_f_neq.front()) << " kHz; equilibration time: rho0 " << eq_time(plain)
      << ", mb " << eq_time(mb) << '\n';
  return kExitOk;
}

DistanceCurves otto_curves(const ExperimentConfig& cfg) {
  DistanceCurves curves = distance_curves(cfg.cycle(), tau_grid(cfg));
  if (!cfg.use_mpemba) {
    curves.mpemba = curves.plain;
  }
  return curves;
}

int cmd_otto_distance(const Options& opt, const ExperimentConfig& cfg, std::ostream& out,
                      std::ostream& err) {
  const DistanceCurves curves = otto_curves(cfg);
  Table table{{"tau2_ms", "trace_distance_plain", "trace_distance_mb"}, {}};
  for (std::size_t k = 0; k < curves.plain.times.size(); ++k) {
    table.rows.push_back(
        {curves.plain.times[k], curves.plain.trace_dist[k], curves.mpemba.trace_dist[k]});
  }
  emit(table, opt, cfg, "otto_distance", err);

  const QmeWindow w = qme_window(curves);
  out << "otto-distance: ";
  if (w.has_crossing) {
    out << "crossing at tau2 = " << num(w.tau_cross) << " ms (delta = " << num(w.delta_cross)
        << "); max separation " << num(w.max_separation) << " at tau2 = " << num(w.tau_max_sep)
        << " ms\n";
  } else {
    out << "no crossing\n";
  }
  return kExitOk;
}

int cmd_otto_ratio(const Options& opt, const ExperimentConfig& cfg, std::ostream& out,
                   std::ostream& err) {
  const DistanceCurves curves = otto_curves(cfg);
  const QmeWindow w = qme_window(curves);
  const auto deltas = default_delta_grid(w);
  const auto reports = power_ratio(curves, cfg.cycle(), deltas);

  Table table{{"delta", "tau2_plain_ms", "tau2_mb_ms", "ratio"}, {}};
  for (const auto& r : reports) {
    table.rows.push_back({r.delta, r.tau2_plain, r.tau2_mb, r.ratio});
  }
  emit(table, opt, cfg, "otto_ratio", err);

  if (reports.empty()) {
    out << "otto-ratio: no QME window (curves do not cross)\n";
    return kExitOk;
  }
  const auto peak = std::max_element(reports.begin(), reports.end(),
                                     [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
  out << "otto-ratio: peak R = " << num(peak->ratio) << " at delta = " << num(peak->delta)
      << " over window [0, " << num(w.delta_cross) << "]\n";
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out) {
  const auto checks = run_verify(cfg);
  std::size_t passed = 0;
  for (const auto& c : checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    passed += c.pass ? 1 : 0;
  }
  out << "verify: " << passed << "/" << checks.size() << " checks passed\n";
  return passed == checks.size() ? kExitOk : kExitVerifyFailed;
}

// ---- verify battery -------------------------------------------------------

DensityMatrix random_qubit_state(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  double x = normal(rng), y = normal(rng), z = normal(rng);
  const double norm = std::sqrt(x * x + y * y + z * z);
  const double r = 0.999 * std::cbrt(uniform(rng)) / norm;
  x *= r;
  y *= r;
  z *= r;
  const ComplexMatrix m =
      0.5 * (ops::identity() + x * ops::sigma_x() + y * ops::sigma_y() + z * ops::sigma_z());
  return DensityMatrix::from_matrix(m);
}

void add_check(std::vector<CheckResult>& out, std::string name,
               const std::function<std::pair<bool, std::string>()>& body) {
  CheckResult r{std::move(name), false, {}};
  try {
    std::tie(r.pass, r.detail) = body();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = e.what();
  }
  out.push_back(std::move(r));
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific;
  s.precision(2);
  s << v;
  return s.str();
}

} // namespace

std::vector<CheckResult> run_verify(const ExperimentConfig& cfg) {
  std::vector<CheckResult> out;
  add_check(out, "config", [&] {
    cfg.validate();
    return std::pair{true, std::string("valid")};
  });

  const ThermalEnvironment env = hot_environment(cfg);
  const double tau_max = full_swap_time_ms(cfg.j_hz);
  const double tau_probe = std::min(1.0, 0.9 * tau_max);

  add_check(out, "cptp", [&] {
    double worst_completeness = 0.0;
    double worst_choi = 0.0;
    for (double tau : uniform_grid(0.0, tau_max, 50)) {
      const KrausChannel ch = build_heat_exchange(env, cfg.j_hz, tau);
      worst_completeness = std::max(worst_completeness, completeness_error(ch));
      const ComplexMatrix choi = choi_matrix(ch);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(choi, Eigen::EigenvaluesOnly);
      worst_choi = std::max(worst_choi, -es.eigenvalues().minCoeff());
    }
    const bool pass = worst_completeness <= 1e-12 && worst_choi <= 1e-12;
    return std::pair{pass, "completeness " + sci(worst_completeness) + ", Choi negativity " +
                               sci(std::max(0.0, worst_choi))};
  });

  add_check(out, "biorthonormality", [&] {
    const auto dec = decompose(extract_generator(build_heat_exchange(env, cfg.j_hz, tau_probe),
                                                 tau_probe));
    const auto n = dec.size();
    const double dev =
        (dec.left_modes * dec.right_modes - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    return std::pair{dev <= kBiorthonormalityTol, "max |<<xi|zeta>> - delta| " + sci(dev)};
  });

  add_check(out, "davies", [&] {
    const auto gen =
        extract_generator(build_heat_exchange(env, cfg.j_hz, tau_probe), tau_probe);
    const DaviesReport r = verify_davies_blocks(gen, ops::identity());
    return std::pair{r.pass, "population-coherence coupling " + sci(r.max_coupling)};
  });

  add_check(out, "rate_ratio", [&] {
    const auto dec = decompose(extract_generator(build_heat_exchange(env, cfg.j_hz, tau_probe),
                                                 tau_probe));
    const double coherence = dec.eigenvalues(1).real();
    const double population = dec.eigenvalues(3).real();
    const double ratio = coherence / population;
    return std::pair{std::abs(ratio - 0.5) <= 1e-8, "coherence/population = " + num(ratio)};
  });

  add_check(out, "gad_equivalence", [&] {
    double worst = 0.0;
    for (double tau : uniform_grid(0.0, tau_max, 50)) {
      worst = std::max(worst, verify_gad_equivalence(build_heat_exchange(env, cfg.j_hz, tau))
                                  .max_deviation);
    }
    return std::pair{worst < 1e-10, "max deviation " + sci(worst)};
  });

  add_check(out, "free_energy_identity", [&] {
    const ComplexMatrix h = env.hamiltonian();
    const GibbsSpec spec{h, env.temperature_khz};
    const DensityMatrix gibbs = gibbs_state(spec);
    const double f_eq = equilibrium_free_energy(spec);
    std::mt19937_64 rng(20240917);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const DensityMatrix rho = random_qubit_state(rng);
      const double lhs = f_neq(rho, h, env.temperature_khz) - f_eq;
      const double rhs = env.temperature_khz * kl_divergence(rho, gibbs);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    return std::pair{worst <= 1e-10, "max |dF - T S_KL| " + sci(worst) + " kHz"};
  });

  add_check(out, "propagation", [&] {
    const auto gen =
        extract_generator(build_heat_exchange(env, cfg.j_hz, tau_probe), tau_probe);
    const auto dec = decompose(gen);
    const DensityMatrix rho0 = x_basis_state(cfg.populations[0], cfg.populations[1]);
    double worst = 0.0;
    for (double t : uniform_grid(0.0, 5.0, 21)) {
      const ComplexMatrix diff =
          propagate_spectral(dec, rho0, t).matrix() - propagate_expm(gen, rho0, t).matrix();
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return std::pair{worst <= 1e-8, "spectral vs expm " + sci(worst)};
  });

  add_check(out, "cycle_closure", [&] {
    const CycleConfig base = cfg.cycle();
    const DensityMatrix start = cold_equilibrium(base);
    double worst_state = 0.0;
    double worst_energy = 0.0;
    for (bool use_mb : {false, true}) {
      CycleConfig c = base;
      c.use_mpemba = use_mb;
      for (double tau2 : uniform_grid(0.0, c.tau2_max_ms(), 5)) {
        const auto records = run_cycle(c, tau2);
        worst_state = std::max(worst_state, trace_distance(records.back().state_after, start));
        worst_energy = std::max(worst_energy, heat_extracted(records, c).first_law_residual);
      }
    }
    return std::pair{worst_state <= 1e-10 && worst_energy <= 1e-8,
                     "state recurrence " + sci(worst_state) + ", energy balance " +
                         sci(worst_energy) + " kHz"};
  });

  add_check(out, "power_ratio", [&] {
    const CycleConfig c = cfg.cycle();
    const DistanceCurves curves = distance_curves(c, tau_grid(cfg));
    const auto deltas = default_delta_grid(qme_window(curves));
    double lowest = 1.0;
    for (const auto& r : power_ratio(curves, c, deltas)) {
      lowest = std::min(lowest, r.ratio);
    }
    return std::pair{lowest >= 1.0 - 1e-12, "min R = " + format_double(lowest, 12) + " over " +
                                                std::to_string(deltas.size()) + " thresholds"};
  });
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Mpemba effect simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Options opt;
  const auto add_common = [&opt](CLI::App* sub, bool writes_table) {
    sub->add_option("--config", opt.config_path, "Config file (key = value)");
    sub->add_option("--populations", opt.populations, "Weights on |x+>, |x-> as a,b")
        ->delimiter(',')
        ->expected(2);
    sub->add_flag("--no-mpemba", opt.no_mpemba, "Skip the Mpemba transformation");
    sub->add_option("--tau-steps", opt.tau_steps, "Points on the tau grid");
    sub->add_option("--theta-steps", opt.theta_steps, "Points on the theta grid");
    if (writes_table) {
      sub->add_option("--out", opt.out_path, "Output table path");
      sub->add_option("--format", opt.format, "Table format")
          ->check(CLI::IsMember({"csv", "json"}));
    }
  };

  auto* spectrum = app.add_subcommand("spectrum", "Generator eigenvalues at a given tau");
  add_common(spectrum, true);
  spectrum->add_option("--tau", opt.tau_ms, "Delay in ms (default 1)");
  auto* surface = app.add_subcommand("surface", "Free-energy surface over theta and tau");
  add_common(surface, true);
  auto* cooling = app.add_subcommand("cooling", "Relaxation of rho(0) and its Mpemba state");
  add_common(cooling, true);
  auto* otto_distance =
      app.add_subcommand("otto-distance", "Trace distance along the refrigerator cooling stroke");
  add_common(otto_distance, true);
  auto* otto_ratio = app.add_subcommand("otto-ratio", "Cooling-power gain ratio R(delta)");
  add_common(otto_ratio, true);
  auto* verify = app.add_subcommand("verify", "Run the invariant battery");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    ExperimentConfig cfg = resolve_config(opt, err);
    if (verify->parsed()) {
      return cmd_verify(cfg, out);
    }
    cfg.validate();
    if (spectrum->parsed()) {
      return cmd_spectrum(opt, cfg, out, err);
    }
    if (surface->parsed()) {
      return cmd_surface(opt, cfg, out, err);
    }
    if (cooling->parsed()) {
      return cmd_cooling(opt, cfg, out, err);
    }
    if (otto_distance->parsed()) {
      return cmd_otto_distance(opt, cfg, out, err);
    }
    return cmd_otto_ratio(opt, cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

} // namespace qmpemba
