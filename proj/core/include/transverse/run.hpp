#pragma once

// Command orchestration: solve -> spectrum -> verify -> scan -> dns, or all of
// them at once with `pipeline`.

#include <iosfwd>
#include <optional>
#include <string>

#include "transverse/dns.hpp"
#include "transverse/instability.hpp"
#include "transverse/io.hpp"
#include "transverse/wave.hpp"

namespace transverse {

enum class Command { solve, spectrum, verify, scan, dns, pipeline };
enum class OutputFormat { json, csv, both };

std::string_view to_string(Command c);
Command command_from_string(std::string_view s);
OutputFormat format_from_string(std::string_view s);

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAssertion = 2;

struct RunConfig {
  Command command = Command::pipeline;
  ProblemParams problem;
  // When set, tau is chosen so the constrained minimizer has this max|u|.
  std::optional<double> target_amplitude;
  int modes = 128;
  std::optional<double> zero_tolerance;
  SolverConfig solver;

  double kappa_min = 0.05;
  double kappa_max = 3.0;
  int kappa_steps = 60;
  std::optional<Sector> sector;
  int workers = 0;

  // 0 picks the most unstable scanned kappa.
  double dns_kappa = 0.0;
  EvolutionConfig evolution;

  // Read the wave from this file instead of solving.
  std::string wave_file;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::json;

  void validate() const;
};

// Parses "1.5" or "auto:amplitude=1.5" into config.problem.tau /
// config.target_amplitude.
void apply_tau_spec(RunConfig& config, const std::string& spec);

// Applies a JSON object whose keys mirror the long CLI flags (without the
// leading dashes, e.g. "kappa-min"); unknown keys are rejected.
void apply_config_json(RunConfig& config, const std::string& text);

// Runs the command, writes artifacts to out_dir and logs progress. Never
// throws: errors are reported on `log` with their module tag.
int run(const RunConfig& config, std::ostream& log);

// The pieces of `run`, exposed for tests.
WaveProfile obtain_wave(const RunConfig& config, std::ostream& log);
PipelineReport run_pipeline(const RunConfig& config, std::ostream& log);

}  // namespace transverse
