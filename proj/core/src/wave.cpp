#include "transverse/wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "transverse/error.hpp"

namespace transverse {

namespace {

constexpr const char* kModule = "wave_solver";
// Max-norm residual below which Newton is attempted.
constexpr double kNewtonBasin = 1e-2;

bool is_even_integer(double a) {
  return a > 0.0 && std::abs(a - std::round(a)) < 1e-12 && static_cast<long>(std::round(a)) % 2 == 0;
}

BasisKind basis_for(Parity p) {
  return p == Parity::odd ? BasisKind::sine : BasisKind::cosine;
}

// Multiplies by the factor that puts u exactly on int |u|^{alpha+2} = tau.
RealField normalize_to_constraint(const RealField& u, double alpha, double tau) {
  const double g = constraint_functional(u, alpha);
  if (!(g > 0.0) || !std::isfinite(g))
    throw DegenerateSolutionError(kModule, "iterate collapsed to the zero field");
  return std::pow(tau / g, 1.0 / (alpha + 2.0)) * u;
}

RealField initial_guess(const ProblemParams& params, const PeriodicGrid& grid,
                        const SolverConfig& config) {
  const double xi = 2.0 * std::numbers::pi / params.period;
  switch (config.initial_guess) {
    case InitialGuess::cosine_seed:
      return RealField::from_function(
          grid, [xi](double x) { return 1.0 + 0.5 * std::cos(xi * x); }, params.parity);
    case InitialGuess::sine_seed:
      return RealField::from_function(
          grid, [xi](double x) { return std::sin(xi * x); }, params.parity);
    case InitialGuess::user_supplied: {
      if (!config.user_guess) throw ParameterError(kModule, "user_supplied seed without a field");
      RealField g = *config.user_guess;
      if (g.size() != grid.size()) g = resample(g, grid.size());
      if (!(g.grid() == grid)) throw ParameterError(kModule, "user seed period differs from L");
      return project_parity(g, params.parity);
    }
  }
  throw ParameterError(kModule, "unknown initial guess");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

void attach_diagnostics(WaveProfile& w) {
  w.fundamental_period = detect_fundamental_period(w.phi);
  w.warnings.clear();
  const double amp = w.phi.max_abs();
  if (w.params.parity == Parity::even) {
    if (!(w.phi.values().minCoeff() > 0.0))
      w.warnings.push_back("even wave is not strictly positive (outside the positive-wave regime)");
  } else if (w.params.parity == Parity::odd) {
    if (parity_defect(w.phi.values(), Parity::odd) > 1e-10 * amp)
      w.warnings.push_back("odd symmetry defect exceeds 1e-10 max|phi|");
    if (count_sign_changes(w.phi) == 0) w.warnings.push_back("odd wave has no sign change");
  }
  if (w.fundamental_period > 0.0 &&
      std::abs(w.fundamental_period - w.params.period) > 1e-9 * w.params.period) {
    w.warnings.push_back("detected fundamental period " + format_number(w.fundamental_period) +
                         " is shorter than L");
  }
}

}  // namespace

void ProblemParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError(kModule, "alpha must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ParameterError(kModule, "omega must be positive");
  if (!(period > 0.0) || !std::isfinite(period)) throw ParameterError(kModule, "period must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError(kModule, "tau must be positive");
  if (parity == Parity::none) throw ParameterError(kModule, "parity must be even or odd");
  if (parity == Parity::odd && !is_even_integer(alpha))
    throw ParameterError(kModule, "odd parity requires even integer alpha");
}

std::string_view to_string(InitialGuess g) {
  switch (g) {
    case InitialGuess::cosine_seed: return "cosine_seed";
    case InitialGuess::sine_seed: return "sine_seed";
    case InitialGuess::user_supplied: return "user_supplied";
  }
  return "cosine_seed";
}

std::string_view to_string(Preconditioner p) {
  return p == Preconditioner::sobolev_h1 ? "sobolev_h1" : "none";
}

InitialGuess initial_guess_from_string(std::string_view s) {
  if (s == "cosine_seed") return InitialGuess::cosine_seed;
  if (s == "sine_seed") return InitialGuess::sine_seed;
  if (s == "user_supplied") return InitialGuess::user_supplied;
  throw ParameterError(kModule, "unknown initial guess '" + std::string(s) + "'");
}

Preconditioner preconditioner_from_string(std::string_view s) {
  if (s == "sobolev_h1") return Preconditioner::sobolev_h1;
  if (s == "none") return Preconditioner::none;
  throw ParameterError(kModule, "unknown preconditioner '" + std::string(s) + "'");
}

void SolverConfig::validate() const {
  if (max_outer_iterations <= 0 || newton_max_steps <= 0)
    throw ParameterError(kModule, "iteration caps must be positive");
  if (!(gradient_tolerance > 0.0) || !(newton_tolerance > 0.0))
    throw ParameterError(kModule, "tolerances must be positive");
}

std::string WaveProfile::id() const {
  return std::string(to_string(params.parity)) + "_a" + format_number(params.alpha) + "_w" +
         format_number(params.omega) + "_L" + format_number(params.period) + "_N" +
         std::to_string(phi.size());
}

double functional_B(const RealField& u, double omega) {
  // Parseval: 1/2 L sum (xi_n^2 + omega) |u_hat(n)|^2, Nyquist included so
  // that the gradient is exactly (-d^2/dx^2 + omega) u.
  const auto c = fourier_coefficients(u);
  const auto& grid = u.grid();
  const int n = grid.size();
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double xi = grid.wavenumber(k <= n / 2 ? k : k - n);
    sum += (xi * xi + omega) * std::norm(c[k]);
  }
  return 0.5 * grid.period() * sum;
}

double constraint_functional(const RealField& u, double alpha) {
  const Eigen::VectorXd p = u.values().cwiseAbs().array().pow(alpha + 2.0);
  return p.sum() * u.grid().spacing();
}

std::pair<double, double> functionals_E_F(const RealField& u, double alpha, double omega) {
  const double b = functional_B(u, omega);
  const double f = 0.5 * inner_product(u, u);
  // B = 1/2 int u_x^2 + omega F, so the kinetic part is B - omega F.
  const double e = (b - omega * f) - constraint_functional(u, alpha) / (alpha + 2.0);
  return {e, f};
}

RealField profile_residual(const RealField& u, double alpha, double omega, double multiplier) {
  const RealField lin = omega * u - second_derivative(u);
  return lin - multiplier * power_nonlinearity(u, alpha);
}

double ode_residual(const RealField& phi, double alpha, double omega) {
  return l2_norm(profile_residual(phi, alpha, omega));
}

WaveProfile minimize_constrained(const ProblemParams& params, int modes, const SolverConfig& config) {
  params.validate();
  config.validate();
  const PeriodicGrid grid(params.period, modes);
  const double alpha = params.alpha;
  const double omega = params.omega;
  const double tau = params.tau;
  const double xi_max = grid.wavenumber(modes / 2);

  RealField u = normalize_to_constraint(initial_guess(params, grid, config), alpha, tau);
  double b = functional_B(u, omega);
  double rel_gradient = std::numeric_limits<double>::infinity();
  int iter = 0;

  for (; iter < config.max_outer_iterations; ++iter) {
    const RealField nonlinear = power_nonlinearity(u, alpha);
    // Preconditioned gradients of B (P A u) and of the constraint (P N(u)).
    RealField pa = u;
    RealField pn = nonlinear;
    if (config.preconditioner == Preconditioner::sobolev_h1) {
      pn = solve_helmholtz(nonlinear, omega);
    } else {
      const double scale = 1.0 / (xi_max * xi_max + omega);
      pa = scale * (omega * u - second_derivative(u));
      pn = scale * nonlinear;
    }
    // Tangency to the constraint surface: <N(u), d> = 0.
    const double mu = inner_product(nonlinear, pa) / inner_product(nonlinear, pn);
    const RealField d = pa - mu * pn;
    rel_gradient = l2_norm(d) / l2_norm(u);

    if (rel_gradient <= config.gradient_tolerance) {
      const double c2 = 2.0 * b / tau;
      const RealField r = profile_residual(u, alpha, omega, c2);
      if (std::pow(c2, 1.0 / alpha) * r.max_abs() <= kNewtonBasin) break;
    }

    bool accepted = false;
    for (double step = 1.0; step > 1e-12; step *= 0.5) {
      RealField trial = normalize_to_constraint(u - step * d, alpha, tau);
      const double bt = functional_B(trial, omega);
      if (bt <= b * (1.0 + 1e-14)) {
        u = std::move(trial);
        b = bt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stagnated at rounding level
  }

  // The constant of the same constraint is always a critical point. Near a
  // bifurcation the descent creeps along a flat direction towards it, so it
  // is taken whenever it is at least as low up to rounding.
  if (params.parity == Parity::even) {
    const double c = std::pow(tau / params.period, 1.0 / (alpha + 2.0));
    const RealField flat(grid, Eigen::VectorXd::Constant(modes, c), Parity::even);
    const double b_flat = functional_B(flat, omega);
    if (b_flat <= b * (1.0 + 1e-14)) {
      u = flat;
      b = b_flat;
    }
  }

  const double c2 = 2.0 * b / tau;
  const RealField r = profile_residual(u, alpha, omega, c2);
  if (iter >= config.max_outer_iterations || std::pow(c2, 1.0 / alpha) * r.max_abs() > kNewtonBasin) {
    throw ConvergenceError(kModule,
                           "constrained descent did not converge in " + std::to_string(iter) +
                               " iterations (relative gradient " + format_number(rel_gradient) + ")",
                           u.values(), rel_gradient);
  }

  WaveProfile w{.params = params, .phi = u};
  w.multiplier = c2;
  w.ode_residual_norm = l2_norm(r);
  w.functional_value = b;
  w.constraint_value = constraint_functional(u, alpha);
  w.descent_iterations = iter;
  attach_diagnostics(w);
  return w;
}

RealField rescale_unit_multiplier(const RealField& u, double multiplier, double alpha) {
  if (!(multiplier > 0.0) || !std::isfinite(multiplier))
    throw InvalidMultiplierError(kModule, "Lagrange multiplier must be positive, got " +
                                              format_number(multiplier));
  return std::pow(multiplier, 1.0 / alpha) * u;
}

WaveProfile rescale_unit_multiplier(const WaveProfile& wave) {
  WaveProfile w = wave;
  const double alpha = wave.params.alpha;
  w.phi = rescale_unit_multiplier(wave.phi, wave.multiplier, alpha);
  const double s = std::pow(wave.multiplier, 1.0 / alpha);
  w.multiplier = 1.0;
  w.ode_residual_norm = ode_residual(w.phi, alpha, wave.params.omega);
  w.functional_value = functional_B(w.phi, wave.params.omega);
  w.constraint_value = std::pow(s, alpha + 2.0) * wave.constraint_value;
  attach_diagnostics(w);
  return w;
}

PhaseReduction phase_reduce(const RealField& phi1, const RealField& phi2, Parity parity,
                            double tolerance) {
  const RealField a = project_parity(phi1, parity);
  const RealField b = project_parity(phi2, parity);
  const double scale = std::max(a.max_abs(), b.max_abs());
  if (scale == 0.0) throw DegenerateSolutionError(kModule, "both components vanish");

  const RealField da = derivative(a, 1);
  const RealField db = derivative(b, 1);
  Eigen::VectorXd w = -da.values().cwiseProduct(b.values()) + db.values().cwiseProduct(a.values());
  const double dscale = std::max(da.max_abs(), db.max_abs());
  const double defect = w.cwiseAbs().maxCoeff();
  if (defect > tolerance * std::max(scale * dscale, scale * scale)) {
    throw ReductionError(kModule, "components are not proportional (Wronskian " +
                                      format_number(defect) + ")");
  }

  if (b.max_abs() <= tolerance * scale) return {a, 0.0};
  const double r = inner_product(a, b) / inner_product(b, b);
  return {std::sqrt(1.0 + r * r) * b, std::atan2(1.0, r)};
}

WaveProfile newton_refine(const WaveProfile& wave, const SolverConfig& config) {
  config.validate();
  const double alpha = wave.params.alpha;
  const double omega = wave.params.omega;
  const ParityBasis basis(basis_for(wave.params.parity), wave.phi.grid());

  RealField phi = project_parity(wave.phi, basis.parity());
  RealField r = profile_residual(phi, alpha, omega);
  if (r.max_abs() > kNewtonBasin) {
    throw BasinError(kModule, "residual " + format_number(r.max_abs()) +
                                  " is outside the Newton basin (max-norm 1e-2)");
  }
  double res = l2_norm(r);
  const double initial = res;
  int step = 0;
  while (res > config.newton_tolerance) {
    if (step >= config.newton_max_steps) {
      throw ConvergenceError(kModule,
                             "Newton did not reach " + format_number(config.newton_tolerance) +
                                 " in " + std::to_string(step) + " steps (residual " +
                                 format_number(res) + ")",
                             phi.values(), res);
    }
    const RealField potential =
        RealField(phi.grid(), Eigen::VectorXd::Constant(phi.size(), omega), Parity::even) -
        (alpha + 1.0) * abs_power(phi, alpha);
    const Eigen::MatrixXd jac = basis.hill_matrix(potential);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double lam_min = lam.cwiseAbs().minCoeff();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    if (lam_min <= 1e-15 * lam_max) {
      throw SingularityError(kModule, "Newton Jacobian is singular on the " +
                                          std::string(to_string(basis.parity())) + " sector");
    }
    const Eigen::VectorXd rc = basis.coefficients(r);
    const Eigen::VectorXd delta =
        eig.eigenvectors() * (eig.eigenvectors().transpose() * rc).cwiseQuotient(lam);
    phi = phi - basis.field(delta);
    r = profile_residual(phi, alpha, omega);
    const double next = l2_norm(r);
    ++step;
    if (!std::isfinite(next) || next > 1e3 * std::max(initial, 1e-12)) {
      throw ConvergenceError(kModule, "Newton iteration diverged", phi.values(), next);
    }
    if (next >= res && next <= 1e2 * config.newton_tolerance) {
      res = next;
      break;  // rounding floor
    }
    res = next;
  }
  if (res > config.newton_tolerance) {
    throw ConvergenceError(kModule, "Newton stalled at residual " + format_number(res),
                           phi.values(), res);
  }

  WaveProfile w = wave;
  w.phi = phi;
  w.multiplier = 1.0;
  w.ode_residual_norm = res;
  w.functional_value = functional_B(phi, omega);
  w.constraint_value = constraint_functional(phi, alpha);
  w.newton_steps = step;
  attach_diagnostics(w);
  return w;
}

WaveProfile solve_wave(const ProblemParams& params, int modes, const SolverConfig& config) {
  const WaveProfile raw = minimize_constrained(params, modes, config);
  const WaveProfile scaled = rescale_unit_multiplier(raw);
  WaveProfile polished = newton_refine(scaled, config);
  polished.descent_iterations = raw.descent_iterations;
  return polished;
}

double tau_for_amplitude(ProblemParams params, int modes, double amplitude,
                         const SolverConfig& config, double amplitude_tolerance) {
  if (!(amplitude > 0.0)) throw ParameterError(kModule, "target amplitude must be positive");
  params.validate();
  SolverConfig cfg = config;
  auto amp_at = [&](double tau) {
    params.tau = tau;
    const WaveProfile w = minimize_constrained(params, modes, cfg);
    cfg.initial_guess = InitialGuess::user_supplied;
    cfg.user_guess = w.phi;
    return w.phi.max_abs();
  };

  double lo = params.tau;
  double hi = lo;
  double a_lo = amp_at(lo);
  if (std::abs(a_lo - amplitude) <= amplitude_tolerance) return lo;
  double a_hi = a_lo;
  // max|u| grows like tau^{1/(alpha+2)}; expand geometrically to bracket.
  for (int k = 0; k < 100 && a_hi < amplitude; ++k) a_hi = amp_at(hi *= 4.0);
  for (int k = 0; k < 100 && a_lo > amplitude; ++k) a_lo = amp_at(lo /= 4.0);
  if (a_lo > amplitude || a_hi < amplitude)
    throw ConvergenceError(kModule, "could not bracket the target amplitude", {}, 0.0);

  for (int k = 0; k < 200; ++k) {
    const double mid = std::sqrt(lo * hi);
    const double a = amp_at(mid);
    if (std::abs(a - amplitude) <= amplitude_tolerance) return mid;
    if (a < amplitude) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceError(kModule, "amplitude bisection did not converge", {}, 0.0);
}

double detect_fundamental_period(const RealField& phi) {
  const auto c = fourier_coefficients(phi);
  const int n = phi.size();
  double cmax = 0.0;
  for (int k = 1; k <= n / 2; ++k) cmax = std::max(cmax, std::abs(c[k]));
  const double ref = std::max(cmax, std::abs(c[0]));
  if (cmax <= 1e-10 * ref || ref == 0.0) return 0.0;
  int g = 0;
  for (int k = 1; k <= n / 2; ++k)
    if (std::abs(c[k]) > 1e-10 * ref) g = std::gcd(g, k);
  return phi.grid().period() / g;
}

int count_sign_changes(const RealField& phi) {
  // Samples within rounding of zero (odd waves vanish on the grid at 0 and
  // L/2) take the sign of the next nonzero sample.
  const double tol = 1e-12 * phi.max_abs();
  std::vector<int> signs;
  for (int j = 0; j < phi.size(); ++j)
    if (std::abs(phi[j]) > tol) signs.push_back(phi[j] > 0.0 ? 1 : -1);
  int changes = 0;
  for (std::size_t j = 0; j < signs.size(); ++j)
    if (signs[j] != signs[(j + 1) % signs.size()]) ++changes;
  return changes;
}

}  // namespace transverse
