#pragma once

// Periodic standing waves of -phi'' + omega phi - |phi|^alpha phi = 0 obtained
// by minimizing B_omega(u) = 1/2 int(u_x^2 + omega u^2) on the constraint set
// int |u|^{alpha+2} = tau inside a parity sector, followed by the multiplier
// rescaling and a Newton polish.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "transverse/spectral.hpp"

namespace transverse {

struct ProblemParams {
  double alpha = 2.0;
  double omega = 1.0;
  double period = 6.283185307179586;
  double tau = 1.0;
  Parity parity = Parity::even;

  // Throws ParameterError; odd parity needs alpha in {2, 4, 6, ...}.
  void validate() const;
};

enum class InitialGuess { cosine_seed, sine_seed, user_supplied };
enum class Preconditioner { sobolev_h1, none };

std::string_view to_string(InitialGuess g);
std::string_view to_string(Preconditioner p);
InitialGuess initial_guess_from_string(std::string_view s);
Preconditioner preconditioner_from_string(std::string_view s);

struct SolverConfig {
  int max_outer_iterations = 50000;
  // Relative size of the preconditioned constrained gradient at which the
  // descent phase hands over to Newton.
  double gradient_tolerance = 1e-6;
  double newton_tolerance = 1e-10;
  int newton_max_steps = 40;
  InitialGuess initial_guess = InitialGuess::cosine_seed;
  Preconditioner preconditioner = Preconditioner::sobolev_h1;
  std::optional<RealField> user_guess;

  void validate() const;
};

struct WaveProfile {
  ProblemParams params;
  RealField phi;
  // c2 in -u'' + omega u = c2 |u|^alpha u; 1 once rescaled.
  double multiplier = 1.0;
  // L2 norm of -u'' + omega u - c2 |u|^alpha u.
  double ode_residual_norm = 0.0;
  double functional_value = 0.0;
  double constraint_value = 0.0;
  // L/m for the smallest detected sub-period; 0 for a constant profile.
  double fundamental_period = 0.0;
  int descent_iterations = 0;
  int newton_steps = 0;
  std::vector<std::string> warnings;

  std::string id() const;
};

double functional_B(const RealField& u, double omega);
// (E(u), F(u)) with E = 1/2 int(u_x^2 - 2/(alpha+2) |u|^{alpha+2}), F = 1/2 int u^2.
std::pair<double, double> functionals_E_F(const RealField& u, double alpha, double omega);
double constraint_functional(const RealField& u, double alpha);

// -u'' + omega u - multiplier |u|^alpha u
RealField profile_residual(const RealField& u, double alpha, double omega, double multiplier = 1.0);
double ode_residual(const RealField& phi, double alpha, double omega);

// Preconditioned gradient phase only; the returned profile carries its
// Lagrange multiplier c2 = 2 B_omega(u) / tau and is not rescaled.
WaveProfile minimize_constrained(const ProblemParams& params, int modes,
                                 const SolverConfig& config = {});

RealField rescale_unit_multiplier(const RealField& u, double multiplier, double alpha);
WaveProfile rescale_unit_multiplier(const WaveProfile& wave);

struct PhaseReduction {
  RealField phi;
  double theta0;
};

// Writes phi1 + i phi2 = exp(i theta0) phi with phi real, after checking the
// Wronskian -phi1' phi2 + phi2' phi1 vanishes.
PhaseReduction phase_reduce(const RealField& phi1, const RealField& phi2, Parity parity,
                            double tolerance = 1e-8);

WaveProfile newton_refine(const WaveProfile& wave, const SolverConfig& config = {});

// minimize_constrained -> rescale_unit_multiplier -> newton_refine, plus the
// acceptance checks (positivity, parity, residual).
WaveProfile solve_wave(const ProblemParams& params, int modes, const SolverConfig& config = {});

// Bisection on tau so that max|u| of the constrained minimizer (before the
// multiplier rescaling) equals amplitude within amplitude_tolerance.
double tau_for_amplitude(ProblemParams params, int modes, double amplitude,
                         const SolverConfig& config = {}, double amplitude_tolerance = 1e-4);

double detect_fundamental_period(const RealField& phi);
int count_sign_changes(const RealField& phi);

}  // namespace transverse
