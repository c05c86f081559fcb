#include "transverse/run.hpp"

#include <filesystem>
#include <ostream>

#include "json.hpp"

#include "transverse/error.hpp"
#include "transverse/hill.hpp"

namespace transverse {

namespace {

constexpr const char* kModule = "cli_io";

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

bool want_json(const RunConfig& c) { return c.format != OutputFormat::csv; }
bool want_csv(const RunConfig& c) { return c.format != OutputFormat::json; }

void emit(const RunConfig& c, std::ostream& log, const std::string& name, const std::string& text) {
  const std::string path = out_path(c, name);
  write_text_file(path, text);
  log << "wrote " << path << "\n";
}

Sector sector_for(const RunConfig& c, const WaveProfile& w) { return c.sector.value_or(default_sector(w)); }

BasisKind spectrum_basis(const RunConfig& c) {
  return c.sector == Sector::odd ? BasisKind::sine : BasisKind::full_fourier;
}

void write_spectra(const RunConfig& c, std::ostream& log, const WaveProfile& w) {
  const BasisKind basis = spectrum_basis(c);
  const std::pair<const char*, OperatorMatrix> ops[] = {
      {"L1", build_hill(w, HillKind::L1, basis)},
      {"L2", build_hill(w, HillKind::L2, basis)},
      {"Lcal", build_block(w, BlockKind::Lcal, 0.0, basis)},
  };
  for (const auto& [name, op] : ops) {
    const SpectrumSummary s = spectrum(op, c.zero_tolerance);
    log << name << " (" << to_string(basis) << "): n = " << s.n_negative << ", z = " << s.kernel_dimension
        << (s.ambiguous ? " (ambiguous)" : "") << "\n";
    if (want_json(c)) emit(c, log, std::string("spectrum_") + name + ".json", serialize(s));
    if (want_csv(c)) emit(c, log, std::string("spectrum_") + name + ".csv", eigenvalues_csv(s));
  }
}

StabilityScan do_scan(const RunConfig& c, std::ostream& log, const WaveProfile& w) {
  const StabilityScan s = scan_kappa(w, c.kappa_min, c.kappa_max, c.kappa_steps, sector_for(c, w), c.workers);
  log << "scan [" << c.kappa_min << ", " << c.kappa_max << "] x " << c.kappa_steps << " ("
      << to_string(s.sector) << "): " << s.verdict();
  if (s.unstable) log << ", max Re lambda = " << s.max_growth << " at kappa = " << s.kappa_at_max;
  log << "\n";
  if (want_json(c)) emit(c, log, "scan.json", serialize(s));
  if (want_csv(c)) emit(c, log, "scan.csv", scan_csv(s));
  return s;
}

GrowthMeasurement do_dns(const RunConfig& c, std::ostream& log, const WaveProfile& w, double kappa) {
  EvolutionConfig ec = c.evolution;
  if (!ec.sector) ec.sector = sector_for(c, w);
  const GrowthMeasurement g = evolve_and_fit(w, kappa, ec);
  log << "dns kappa = " << kappa << ": fitted rate " << g.fitted_rate << ", scanner " << g.scanner_lambda
      << ", gap " << g.relative_gap << ", fit residual " << g.fit_residual << "\n";
  if (want_json(c)) emit(c, log, "growth.json", serialize(g));
  if (want_csv(c)) emit(c, log, "growth.csv", growth_csv(g));
  return g;
}

// Whether the DNS measurement agrees with the scanner.
bool dns_agrees(const GrowthMeasurement& g) {
  if (!g.accepted()) return false;
  if (g.scanner_lambda > kUnstableThreshold) return g.relative_gap <= 0.02;
  return g.fitted_rate <= 1e-3;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::spectrum: return "spectrum";
    case Command::verify: return "verify";
    case Command::scan: return "scan";
    case Command::dns: return "dns";
    case Command::pipeline: return "pipeline";
  }
  return "pipeline";
}

Command command_from_string(std::string_view s) {
  for (Command c : {Command::solve, Command::spectrum, Command::verify, Command::scan, Command::dns,
                    Command::pipeline})
    if (to_string(c) == s) return c;
  throw ParameterError(kModule, "unknown command '" + std::string(s) + "'");
}

OutputFormat format_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "both") return OutputFormat::both;
  throw ParameterError(kModule, "unknown format '" + std::string(s) + "' (json, csv, both)");
}

void RunConfig::validate() const {
  if (wave_file.empty()) problem.validate();
  if (modes < 8 || modes % 2 != 0) throw ParameterError(kModule, "modes must be even and at least 8");
  if (zero_tolerance && !(*zero_tolerance > 0.0)) throw ParameterError(kModule, "zero tolerance must be positive");
  if (target_amplitude && !(*target_amplitude > 0.0))
    throw ParameterError(kModule, "target amplitude must be positive");
  if (!(kappa_min >= 0.0) || !(kappa_max > kappa_min))
    throw ParameterError(kModule, "kappa range needs 0 <= kappa-min < kappa-max");
  if (kappa_steps < 2) throw ParameterError(kModule, "kappa-steps must be at least 2");
  if (dns_kappa < 0.0) throw ParameterError(kModule, "dns kappa must be positive");
  if (!wave_file.empty() && !std::filesystem::exists(wave_file))
    throw ParameterError(kModule, "wave file '" + wave_file + "' does not exist");
  solver.validate();
}

void apply_tau_spec(RunConfig& config, const std::string& spec) {
  const std::string prefix = "auto:amplitude=";
  try {
    std::size_t used = 0;
    if (spec.rfind(prefix, 0) == 0) {
      const std::string rest = spec.substr(prefix.size());
      config.target_amplitude = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("trailing characters");
    } else {
      config.problem.tau = std::stod(spec, &used);
      if (used != spec.size()) throw std::invalid_argument("trailing characters");
      config.target_amplitude.reset();
    }
  } catch (const std::logic_error&) {
    throw ParameterError(kModule, "bad tau '" + spec + "' (expected a number or auto:amplitude=A)");
  }
}

void apply_config_json(RunConfig& c, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(kModule, "corrupted config JSON at byte " + std::to_string(e.byte));
  }
  if (!j.is_object()) throw FormatError(kModule, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = command_from_string(v.get<std::string>());
      else if (key == "alpha") c.problem.alpha = v.get<double>();
      else if (key == "omega") c.problem.omega = v.get<double>();
      else if (key == "period") c.problem.period = v.get<double>();
      else if (key == "parity") c.problem.parity = parity_from_string(v.get<std::string>());
      else if (key == "modes") c.modes = v.get<int>();
      else if (key == "tau") apply_tau_spec(c, v.is_string() ? v.get<std::string>() : v.dump());
      else if (key == "zero-tolerance") c.zero_tolerance = v.get<double>();
      else if (key == "kappa-min") c.kappa_min = v.get<double>();
      else if (key == "kappa-max") c.kappa_max = v.get<double>();
      else if (key == "kappa-steps") c.kappa_steps = v.get<int>();
      else if (key == "sector") c.sector = sector_from_string(v.get<std::string>());
      else if (key == "workers") c.workers = v.get<int>();
      else if (key == "out") c.out_dir = v.get<std::string>();
      else if (key == "format") c.format = format_from_string(v.get<std::string>());
      else if (key == "wave") c.wave_file = v.get<std::string>();
      else if (key == "dns-kappa") c.dns_kappa = v.get<double>();
      else if (key == "dns-scheme") c.evolution.scheme = scheme_from_string(v.get<std::string>());
      else if (key == "dns-seed") c.evolution.seed = seed_from_string(v.get<std::string>());
      else if (key == "dns-dt") c.evolution.time_step = v.get<double>();
      else if (key == "dns-final-time") c.evolution.final_time = v.get<double>();
      else if (key == "random-seed") c.evolution.random_seed = v.get<std::uint64_t>();
      else if (key == "max-iterations") c.solver.max_outer_iterations = v.get<int>();
      else if (key == "gradient-tolerance") c.solver.gradient_tolerance = v.get<double>();
      else if (key == "newton-tolerance") c.solver.newton_tolerance = v.get<double>();
      else if (key == "initial-guess") c.solver.initial_guess = initial_guess_from_string(v.get<std::string>());
      else if (key == "preconditioner") c.solver.preconditioner = preconditioner_from_string(v.get<std::string>());
      else throw FormatError(kModule, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(kModule, std::string("config value has the wrong type: ") + e.what());
  }
}

WaveProfile obtain_wave(const RunConfig& c, std::ostream& log) {
  if (!c.wave_file.empty()) {
    WaveProfile w = parse_wave(read_text_file(c.wave_file));
    log << "loaded " << w.id() << " from " << c.wave_file << "\n";
    return w;
  }
  ProblemParams p = c.problem;
  if (c.target_amplitude) {
    p.tau = tau_for_amplitude(p, c.modes, *c.target_amplitude, c.solver);
    log << "tau = " << p.tau << " for max|u| = " << *c.target_amplitude << "\n";
  }
  WaveProfile w = solve_wave(p, c.modes, c.solver);
  log << "solved " << w.id() << ": residual " << w.ode_residual_norm << ", max|phi| " << w.phi.max_abs()
      << ", " << w.descent_iterations << " descent + " << w.newton_steps << " Newton steps\n";
  for (const auto& warning : w.warnings) log << "warning: " << warning << "\n";
  return w;
}

PipelineReport run_pipeline(const RunConfig& c, std::ostream& log) {
  PipelineReport r{.wave = obtain_wave(c, log)};
  r.target_amplitude = c.target_amplitude;
  const WaveProfile& w = r.wave;
  r.lcal = spectrum(build_block(w, BlockKind::Lcal, 0.0, proposition_sector(w)), c.zero_tolerance);
  r.propositions = check_propositions(w);
  r.hypotheses = verify_hypotheses(w, sector_for(c, w));
  r.scan = scan_kappa(w, c.kappa_min, c.kappa_max, c.kappa_steps, sector_for(c, w), c.workers);
  r.doubling = grid_doubling_check(w, 10, c.solver);
  if (r.scan.unstable) {
    EvolutionConfig ec = c.evolution;
    if (!ec.sector) ec.sector = sector_for(c, w);
    r.growth = evolve_and_fit(w, c.dns_kappa > 0.0 ? c.dns_kappa : r.scan.kappa_at_max, ec);
  }
  r.verdict = r.scan.verdict();
  return r;
}

int run(const RunConfig& c, std::ostream& log) {
  try {
    c.validate();
    std::filesystem::create_directories(c.out_dir);

    if (c.command == Command::pipeline) {
      const PipelineReport r = run_pipeline(c, log);
      emit(c, log, "pipeline.json", serialize(r));
      if (want_csv(c)) {
        emit(c, log, "scan.csv", scan_csv(r.scan));
        emit(c, log, "spectrum_Lcal.csv", eigenvalues_csv(r.lcal));
        if (r.growth) emit(c, log, "growth.csv", growth_csv(*r.growth));
      }
      log << "propositions: " << (r.propositions.passed() ? "pass" : "FAIL") << "\n";
      log << "hypotheses H0-H4: " << (r.hypotheses.overall() ? "pass" : "FAIL") << "\n";
      log << "grid doubling max delta: " << r.doubling.max_delta << "\n";
      if (r.growth)
        log << "dns at kappa = " << r.growth->kappa << ": rate " << r.growth->fitted_rate << " vs "
            << r.growth->scanner_lambda << "\n";
      log << "verdict: " << r.verdict << "\n";
      const bool ok = r.propositions.passed() && r.hypotheses.overall() && (!r.growth || dns_agrees(*r.growth));
      return ok ? kExitOk : kExitAssertion;
    }

    const WaveProfile w = obtain_wave(c, log);
    switch (c.command) {
      case Command::solve:
        emit(c, log, "wave.json", serialize(w));
        return kExitOk;
      case Command::spectrum:
        write_spectra(c, log, w);
        return kExitOk;
      case Command::verify: {
        const PropositionReport pr = check_propositions(w);
        const HypothesisReport hr = verify_hypotheses(w, sector_for(c, w), c.kappa_max);
        for (const auto& ch : pr.checks)
          if (!ch.passed) log << "proposition check failed: " << ch.name << " (expected " << ch.expected
                              << ", observed " << ch.observed << ")\n";
        for (const auto* h : {&hr.h0, &hr.h1, &hr.h2, &hr.h3, &hr.h4})
          if (!h->passed) log << "hypothesis failed: " << h->details << "\n";
        emit(c, log, "propositions.json", serialize(pr));
        emit(c, log, "hypotheses.json", serialize(hr));
        log << "propositions: " << (pr.passed() ? "pass" : "FAIL") << ", hypotheses: "
            << (hr.overall() ? "pass" : "FAIL") << "\n";
        return pr.passed() && hr.overall() ? kExitOk : kExitAssertion;
      }
      case Command::scan:
        do_scan(c, log, w);
        return kExitOk;
      case Command::dns: {
        double kappa = c.dns_kappa;
        if (kappa <= 0.0) {
          const StabilityScan s = scan_kappa(w, c.kappa_min, c.kappa_max, c.kappa_steps, sector_for(c, w), c.workers);
          kappa = s.unstable ? s.kappa_at_max : c.kappa_max;
        }
        return dns_agrees(do_dns(c, log, w, kappa)) ? kExitOk : kExitAssertion;
      }
      case Command::pipeline: break;
    }
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace transverse
