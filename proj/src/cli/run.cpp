#include "nnjump/cli/run.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "nnjump/conditions.hpp"
#include "nnjump/ensemble.hpp"
#include "nnjump/gadget.hpp"

namespace nnjump::cli {

namespace {

std::optional<double> growth_constant(const Scenario& s) {
  try {
    const auto grid = default_state_grid(s.config.m_cap);
    const auto r = check_linear_growth(s.model, grid);
    return r.constants.at("K");
  } catch (const Error& e) {
    if (!e.is_numerical()) throw;
    return std::nullopt;
  }
}

TestFunction test_function(const std::string& name) {
  if (name == "x") return TestFunction::identity();
  if (name == "x2") return TestFunction::square();
  if (name == "exp_neg") return TestFunction::exp_neg();
  if (name == "const") return TestFunction::constant();
  fail(ErrorKind::Config, "diagnostics.f: unknown test function '" + name + "' (x, x2, exp_neg, const)");
}

std::vector<double> mark_grid(const Dynamics& d) {
  std::vector<double> z;
  for (int i = 0; i <= 48; ++i) z.push_back(std::pow(10.0, -6.0 + i / 6.0));
  for (const auto& ch : d.channels) {
    if (ch.action == JumpAction::Thinned && ch.rate.z_threshold > 0.0) {
      z.push_back(ch.rate.z_threshold);
      z.push_back(ch.rate.z_threshold * (1.0 + 1e-9));
    }
  }
  std::sort(z.begin(), z.end());
  return z;
}

bool drift_map_monotone(const Engine& eng) {
  const double h = eng.config().dt_max;
  const auto grid = default_state_grid(eng.config().m_cap, 2000);
  double prev = -std::numeric_limits<double>::infinity();
  for (double x : grid) {
    const double v = x + eng.effective_drift(x) * h;
    if (v < prev - 1e-12 * std::max(1.0, std::fabs(prev))) return false;
    prev = v;
  }
  return true;
}

DiagnosticsReport unavailable(DiagnosticKind k, const std::string& why) {
  DiagnosticsReport r;
  r.kind = k;
  r.verdict = Verdict::Fail;
  r.statistic = std::numeric_limits<double>::quiet_NaN();
  r.note = why;
  return r;
}

std::string verdict_line(const ConditionReport& r) {
  std::ostringstream o;
  o << r.condition_id << " " << to_string(r.verdict);
  for (const auto& [k, v] : r.constants) o << " " << k << "=" << v;
  if (!r.note.empty()) o << " (" << r.note << ")";
  return o.str();
}

std::string verdict_line(const DiagnosticsReport& r) {
  std::ostringstream o;
  o << to_string(r.kind) << " " << to_string(r.verdict) << " statistic=" << r.statistic << " band=[" << r.band_lo
    << ", " << r.band_hi << "]";
  if (!r.note.empty()) o << " (" << r.note << ")";
  return o.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int exit_code_for(const Error& e) { return e.is_numerical() ? 3 : 2; }

Summary run_simulation(const Scenario& s, unsigned threads, std::vector<SimPath>* dump) {
  const Engine eng(s.model, s.config);
  EnsembleOptions opt;
  opt.t_grid = s.t_grid;
  opt.threads = threads;
  const EnsembleResult r = run_ensemble(eng, s.x0, opt);
  if (dump) {
    const std::size_t n = std::min<std::size_t>(s.outputs.path_cap, s.config.n_paths);
    dump->clear();
    for (std::size_t p = 0; p < n; ++p) dump->push_back(simulate_path(eng, s.x0, p));
  }
  return make_summary(s, r, eng.truncation_variance_rate() * s.config.horizon, growth_constant(s));
}

std::vector<ConditionReport> run_conditions(const Scenario& s) {
  const Dynamics d = s.model.compile();
  const auto grid = default_state_grid(s.config.m_cap);
  const auto pairs = default_pair_grid(s.config.m_cap);
  std::vector<ConditionReport> out;
  for (const auto& id : s.conditions) {
    if (id == "6a" || id == "2a") {
      out.push_back(check_linear_growth(s.model, grid));
    } else if (id == "6b" || id == "2b") {
      out.push_back(check_local_bound(s.model, grid));
    } else if (id == "6c" || id == "3a") {
      out.push_back(fit_modulus(s.model, pairs, ModulusTarget::OsgoodR));
    } else if (id == "6d" || id == "3b") {
      out.push_back(fit_modulus(s.model, pairs, ModulusTarget::SquareRho));
    } else if (id == "monotone" || id == "3c") {
      const auto z = mark_grid(d);
      out.push_back(check_monotone(s.model, grid, z));
    } else if (id == "lipschitz" || id == "2c" || id == "6e") {
      out.push_back(fit_modulus(s.model, pairs, ModulusTarget::Lipschitz));
    } else if (id == "4a") {
      out.push_back(check_second_moment(s.model));
    } else {
      fail(ErrorKind::Config, "conditions.list: unknown condition '" + id + "'");
    }
  }
  return out;
}

DiagnosticsReport run_gadget_suite(const GadgetSpec& spec, std::uint64_t seed) {
  const Gadget g(PowerModulus{spec.C, spec.gamma}, spec.k_max, spec.variant);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiagnosticsReport rep;
  rep.kind = DiagnosticKind::GadgetBounds;
  rep.verdict = Verdict::Pass;
  rep.statistic = -std::numeric_limits<double>::infinity();
  rep.band_hi = 1e-9;
  std::size_t violations = 0;
  for (int k = 1; k <= spec.k_max; ++k) {
    const double part = g.partition_integral(k);
    const double part_err = std::fabs(part - k) / k;
    const double mass = g.psi_mass(k);
    const double env = gadget_envelope_excess(g, k);
    std::vector<std::pair<double, double>> samples;
    const double la = std::log10(g.a(k));
    for (std::size_t i = 0; i < spec.samples; ++i) {
      const double sgn = spec.variant == GadgetVariant::OneSided || u(rng) < 0.5 ? 1.0 : -1.0;
      const double zeta = sgn * std::pow(10.0, la - 1.0 + u(rng) * (1.0 - la + 2.0));
      const double h = i % 50 == 0 ? 0.0 : sgn * std::pow(10.0, la - 2.0 + u(rng) * (1.0 - la + 3.0));
      samples.emplace_back(zeta, h);
    }
    const auto b = gadget_bounds_check(g, k, samples);
    const std::size_t v = std::stoul(b.metadata.at("violations"));
    violations += v;
    rep.rows.push_back({static_cast<double>(k), g.a(k), part, mass, env, b.statistic, static_cast<double>(v)});
    rep.statistic = std::max({rep.statistic, b.statistic, env});
    if (part_err > 1e-6 || std::fabs(mass - 1.0) > 1e-6 || env > 0.0 || v > 0) rep.verdict = Verdict::Fail;
  }
  rep.metadata["violations"] = std::to_string(violations);
  rep.metadata["k_max"] = std::to_string(spec.k_max);
  rep.note = "rows: k, a_k, partition integral, psi mass, envelope excess, worst bound excess, violations";
  return rep;
}

std::vector<DiagnosticsReport> run_diagnostics(const Scenario& s, const std::vector<std::string>& tests,
                                               unsigned threads) {
  std::vector<DiagnosticsReport> out;
  std::optional<Engine> eng;
  std::optional<EnsembleResult> ens;
  auto engine = [&]() -> const Engine& {
    if (!eng) eng.emplace(s.model, s.config);
    return *eng;
  };
  auto ensemble = [&]() -> const EnsembleResult& {
    if (!ens) {
      EnsembleOptions opt;
      opt.t_grid = s.t_grid;
      opt.threads = threads;
      const TestFunction f = test_function(s.diagnostics.f);
      const double range = std::min(s.config.m_cap, std::max(50.0, 10.0 * (1.0 + s.x0)));
      const auto table = std::make_shared<GeneratorTable>(engine().dynamics(), f, range);
      opt.f = f.f;
      opt.Lf = [table](double x) { return (*table)(x); };
      ens = run_ensemble(engine(), s.x0, opt);
    }
    return *ens;
  };
  for (const auto& t : tests) {
    if (t == "moment1") {
      const auto K = growth_constant(s);
      out.push_back(K ? audit_first_moment(ensemble(), *K)
                      : unavailable(DiagnosticKind::MomentBound1, "linear-growth constant diverges"));
    } else if (t == "moment2") {
      const auto c = check_second_moment(s.model);
      out.push_back(c.verdict == Verdict::Pass
                        ? audit_second_moment(ensemble(), c.constants.at("K"), s.diagnostics.sup_mode)
                        : unavailable(DiagnosticKind::MomentBound2, "second-moment constant: " + c.note));
    } else if (t == "martingale") {
      auto r = martingale_residual(ensemble(), s.diagnostics.budget);
      r.metadata["f"] = s.diagnostics.f;
      out.push_back(r);
    } else if (t == "comparison") {
      if (!s.model.monotone()) {
        fail(ErrorKind::MonotonicityUnverified, "model.h0_monotone/model.h1_monotone: coupling needs monotone rates");
      }
      CoupledOptions opt;
      opt.x0 = {s.diagnostics.x0_low, s.diagnostics.x0_high};
      opt.t = s.config.horizon;
      opt.threads = threads;
      opt.check_order = true;
      if (!(s.diagnostics.x0_low <= s.diagnostics.x0_high)) {
        fail(ErrorKind::Config, "diagnostics.x0_low must not exceed diagnostics.x0_high");
      }
      const auto r = run_coupled_ensemble(engine(), opt);
      out.push_back(comparison_audit(r, drift_map_monotone(engine()), true));
    } else if (t == "dependence") {
      out.push_back(dependence_curve(engine(), s.diagnostics.x0_star, s.diagnostics.dependence_x0,
                                     std::min(s.diagnostics.t, s.config.horizon), threads));
    } else if (t == "richardson") {
      out.push_back(richardson_check(engine(), s.x0, threads));
    } else if (t == "gadget") {
      out.push_back(run_gadget_suite(s.gadget, s.config.root_seed));
    } else {
      fail(ErrorKind::Config, "--tests: unknown diagnostic '" + t +
                                  "' (moment1, moment2, martingale, comparison, dependence, richardson, gadget)");
    }
  }
  return out;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Simulation and verification of non-negative jump SDEs", "nnjump"};
  app.require_subcommand(1);
  std::string scenario_path, out_dir = ".", tests;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--scenario", scenario_path, "scenario file")->required();
  app.add_option("--seed", seed, "root seed");
  app.add_option("--paths", paths, "number of paths");
  app.add_option("--dt", dt, "base Euler step");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (speed only)");
  auto* sim = app.add_subcommand("simulate", "simulate an ensemble and write the summary")->fallthrough();
  auto* cond = app.add_subcommand("check-conditions", "verify coefficient conditions")->fallthrough();
  auto* diag = app.add_subcommand("diagnose", "run statistical diagnostics")->fallthrough();
  diag->add_option("--tests", tests, "comma-separated diagnostics");
  app.add_subcommand("gadget", "dump the smoothing gadget tables")->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string command = sim->parsed() ? "simulate" : cond->parsed() ? "check-conditions" : diag->parsed() ? "diagnose"
                                                                                             : "gadget";
  if (const char* env = std::getenv("NNJUMP_OUT"); env && *env) out_dir = env;
  int code = 0;
  std::string digest;
  std::uint64_t root_seed = 0;
  try {
    Scenario s = load_scenario(scenario_path);
    if (seed) s.config.root_seed = *seed;
    if (paths) s.config.n_paths = *paths;
    if (dt) s.config.dt_max = *dt;
    if (threads == 0) fail(ErrorKind::Config, "--threads must be >= 1");
    s.config.validate(s.x0);
    root_seed = s.config.root_seed;
    digest = sha256_hex(serialize_scenario(s));
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorKind::Io, "--out: cannot create '" + out_dir + "'");
    const std::filesystem::path out(out_dir);

    if (command == "simulate") {
      std::vector<SimPath> dump;
      const Summary sum = run_simulation(s, threads, s.outputs.paths_csv.empty() ? nullptr : &dump);
      write_file((out / s.outputs.summary).string(), summary_json(sum));
      if (!s.outputs.paths_csv.empty()) {
        write_file((out / s.outputs.paths_csv).string(), paths_csv(dump, s.model.compile()));
      }
      if (!s.outputs.svg.empty()) write_file((out / s.outputs.svg).string(), plot_svg(sum));
      for (std::size_t i = 0; i < sum.t_grid.size(); ++i) {
        std::cout << "t=" << sum.t_grid[i] << " mean=" << sum.mean[i] << " se=" << sum.se[i] << "\n";
      }
    } else if (command == "check-conditions") {
      const auto reports = run_conditions(s);
      write_file((out / "conditions.json").string(), reports_json(reports));
      for (const auto& r : reports) {
        std::cout << verdict_line(r) << "\n";
        if (r.verdict != Verdict::Pass) code = 1;
      }
    } else if (command == "diagnose") {
      const auto list = tests.empty() ? s.diagnostics.tests : split_list(tests);
      if (list.empty()) fail(ErrorKind::Config, "--tests: no diagnostics requested");
      const auto reports = run_diagnostics(s, list, threads);
      write_file((out / "diagnostics.json").string(), diagnostics_json(reports));
      for (const auto& r : reports) {
        std::cout << verdict_line(r) << "\n";
        if (r.verdict != Verdict::Pass) code = 1;
      }
    } else {
      const Gadget g(PowerModulus{s.gadget.C, s.gadget.gamma}, s.gadget.k_max, s.gadget.variant);
      std::ostringstream part, phi;
      part << "k,a_k,partition_integral,psi_mass\n";
      phi << "k,x,phi,dphi,d2phi\n";
      part.precision(17);
      phi.precision(17);
      for (int k = 1; k <= g.k_max(); ++k) {
        part << k << "," << g.a(k) << "," << g.partition_integral(k) << "," << g.psi_mass(k) << "\n";
        const double lo = g.a(k) / 10.0, hi = 2.0;
        for (std::size_t i = 0; i < s.gadget.phi_points; ++i) {
          const double x = lo * std::pow(hi / lo, static_cast<double>(i) / std::max<std::size_t>(1, s.gadget.phi_points - 1));
          phi << k << "," << x << "," << g.phi(k, x) << "," << g.dphi(k, x) << "," << g.d2phi(k, x) << "\n";
        }
      }
      write_file((out / "gadget_partition.csv").string(), part.str());
      write_file((out / "gadget_phi.csv").string(), phi.str());
      std::cout << "gadget: k_max=" << g.k_max() << " a_kmax=" << g.a(g.k_max()) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    code = exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 3;
  }
  if (!digest.empty()) {
    try {
      const ManifestEntry entry{command, code};
      write_file((std::filesystem::path(out_dir) / "manifest.json").string(),
                 manifest_json(digest, root_seed, std::span<const ManifestEntry>(&entry, 1)));
    } catch (const Error& e) {
      std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
      if (code == 0) code = 2;
    }
  }
  return code;
}

}  // namespace nnjump::cli
