#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "transverse/error.hpp"
#include "transverse/run.hpp"

using namespace transverse;

int main(int argc, char** argv) {
  CLI::App app{"Transverse stability of periodic NLS standing waves"};
  app.set_version_flag("--version", "transverse 0.1.0");

  std::string command = "pipeline";
  app.add_option("command", command, "solve | spectrum | verify | scan | dns | pipeline")
      ->check(CLI::IsMember({"solve", "spectrum", "verify", "scan", "dns", "pipeline"}));

  std::string config_file;
  app.add_option("--config", config_file, "JSON file mirroring the long flags; flags win")
      ->check(CLI::ExistingFile);

  double alpha = 0, omega = 0, period = 0, zero_tol = 0, kmin = 0, kmax = 0, dns_kappa = 0, dt = 0, tfinal = 0;
  int modes = 0, ksteps = 0, workers = 0;
  std::uint64_t random_seed = 0;
  std::string parity, tau, sector, out, format, wave, scheme, seed;

  auto* o_alpha = app.add_option("--alpha", alpha, "nonlinearity exponent (> 0)");
  auto* o_omega = app.add_option("--omega", omega, "frequency (> 0)");
  auto* o_period = app.add_option("--period", period, "spatial period L");
  auto* o_parity = app.add_option("--parity", parity, "even | odd")->check(CLI::IsMember({"even", "odd"}));
  auto* o_modes = app.add_option("--modes", modes, "grid points N (even)");
  auto* o_tau = app.add_option("--tau", tau, "constraint value, or auto:amplitude=A");
  auto* o_ztol = app.add_option("--zero-tolerance", zero_tol, "kernel tolerance (default 1e-6 (1 + |lambda_max|))");
  auto* o_kmin = app.add_option("--kappa-min", kmin, "scan start");
  auto* o_kmax = app.add_option("--kappa-max", kmax, "scan end");
  auto* o_ksteps = app.add_option("--kappa-steps", ksteps, "scan points, endpoints included");
  auto* o_sector = app.add_option("--sector", sector, "full | odd")->check(CLI::IsMember({"full", "odd"}));
  auto* o_workers = app.add_option("--workers", workers, "scan threads (0 = all cores)");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_format = app.add_option("--format", format, "json | csv | both")
                       ->check(CLI::IsMember({"json", "csv", "both"}));
  auto* o_wave = app.add_option("--wave", wave, "read the wave from a WaveProfile JSON file");
  auto* o_dkappa = app.add_option("--dns-kappa", dns_kappa, "kappa for dns (default: most unstable)");
  auto* o_scheme = app.add_option("--dns-scheme", scheme, "explicit_rk4 | splitting_order2");
  auto* o_seed = app.add_option("--dns-seed", seed, "leading_eigenvector | random");
  auto* o_dt = app.add_option("--dns-dt", dt, "time step (default from the spectral radius)");
  auto* o_tfinal = app.add_option("--dns-final-time", tfinal, "horizon (default: until the fit window closes)");
  auto* o_rseed = app.add_option("--random-seed", random_seed, "seed for --dns-seed random");

  CLI11_PARSE(app, argc, argv);

  RunConfig c;
  try {
    if (!config_file.empty()) apply_config_json(c, read_text_file(config_file));
    // A positional command always wins; the file may set one otherwise.
    if (app.get_option("command")->count()) c.command = command_from_string(command);
    if (o_alpha->count()) c.problem.alpha = alpha;
    if (o_omega->count()) c.problem.omega = omega;
    if (o_period->count()) c.problem.period = period;
    if (o_parity->count()) c.problem.parity = parity_from_string(parity);
    if (o_modes->count()) c.modes = modes;
    if (o_tau->count()) apply_tau_spec(c, tau);
    if (o_ztol->count()) c.zero_tolerance = zero_tol;
    if (o_kmin->count()) c.kappa_min = kmin;
    if (o_kmax->count()) c.kappa_max = kmax;
    if (o_ksteps->count()) c.kappa_steps = ksteps;
    if (o_sector->count()) c.sector = sector_from_string(sector);
    if (o_workers->count()) c.workers = workers;
    if (o_out->count()) c.out_dir = out;
    if (o_format->count()) c.format = format_from_string(format);
    if (o_wave->count()) c.wave_file = wave;
    if (o_dkappa->count()) c.dns_kappa = dns_kappa;
    if (o_scheme->count()) c.evolution.scheme = scheme_from_string(scheme);
    if (o_seed->count()) c.evolution.seed = seed_from_string(seed);
    if (o_dt->count()) c.evolution.time_step = dt;
    if (o_tfinal->count()) c.evolution.final_time = tfinal;
    if (o_rseed->count()) c.evolution.random_seed = random_seed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return run(c, std::cerr);
}
