#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "transverse/error.hpp"
#include "transverse/wave.hpp"
#include "waves.hpp"

using namespace transverse;
using testing_support::two_pi;

namespace {

RealField sample(const PeriodicGrid& g, const std::function<double(double)>& f, Parity p = Parity::none) {
  return RealField::from_function(g, f, p);
}

double max_node_error(const RealField& f, const std::vector<double>& ref) {
  double e = 0.0;
  for (int j = 0; j < f.size(); ++j) e = std::max(e, std::abs(f[j] - ref[j]));
  return e;
}

}  // namespace

TEST_CASE("functional_B closed forms") {
  const PeriodicGrid g(two_pi, 64);
  CHECK(functional_B(RealField::zeros(g), 1.0) == 0.0);
  CHECK(functional_B(sample(g, [](double x) { return std::cos(x); }), 1.0) == doctest::Approx(oracle::pi).epsilon(1e-14));
  CHECK(functional_B(RealField(g, Eigen::VectorXd::Constant(64, 3.0)), 2.0) ==
        doctest::Approx(2.0 * two_pi * 9.0 / 2.0).epsilon(1e-14));
}

TEST_CASE("E and F") {
  const PeriodicGrid g(two_pi, 64);
  const auto [e0, f0] = functionals_E_F(RealField::zeros(g), 2.0, 1.0);
  CHECK(e0 == 0.0);
  CHECK(f0 == 0.0);

  // u = 1, alpha = 2: E = 1/2 int(-2/4) = -L/4, F = L/2.
  const RealField one(g, Eigen::VectorXd::Ones(64));
  const auto [e1, f1] = functionals_E_F(one, 2.0, 1.0);
  CHECK(e1 == doctest::Approx(-two_pi / 4.0).epsilon(1e-14));
  CHECK(f1 == doctest::Approx(two_pi / 2.0).epsilon(1e-14));

  SUBCASE("identity B = E + omega F + int |u|^{alpha+2} / (alpha+2)") {
    const RealField u = sample(g, [](double x) { return 1.2 + 0.3 * std::cos(x) - 0.1 * std::sin(3 * x); });
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
      const auto [e, f] = functionals_E_F(u, alpha, 1.7);
      const double rhs = e + 1.7 * f + constraint_functional(u, alpha) / (alpha + 2.0);
      CHECK(std::abs(functional_B(u, 1.7) - rhs) < 1e-12 * std::abs(rhs));
    }
  }

  SUBCASE("dnoidal wave against fine quadrature") {
    const oracle::Dnoidal dn(1.0, two_pi);
    const PeriodicGrid g128(two_pi, 128);
    const auto [e, f] = functionals_E_F(sample(g128, dn), 2.0, 1.0);
    const auto [eq, fq] = oracle::quadrature_E_F(dn, [&](double x) { return dn.derivative(x); }, 2.0, two_pi);
    CHECK(std::abs(e - eq) < 1e-10);
    CHECK(std::abs(f - fq) < 1e-10);
  }
}

TEST_CASE("discrete gradient of B matches centred differences") {
  const PeriodicGrid g(two_pi, 64);
  const double omega = 1.3;
  const RealField u = sample(g, [](double x) { return std::exp(std::cos(x)); });
  const RealField grad = g.spacing() * (omega * u - second_derivative(u));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd d(64);
    for (auto& x : d) x = n(rng);
    const RealField dir(g, d);
    const double eps = 1e-4;
    const double fd = (functional_B(u + eps * dir, omega) - functional_B(u - eps * dir, omega)) / (2 * eps);
    const double an = grad.values().dot(d);
    CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an));
  }
}

TEST_CASE("parameter validation") {
  ProblemParams p;
  p.parity = Parity::odd;
  p.alpha = 3.0;
  try {
    p.validate();
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("odd parity requires even integer alpha") != std::string::npos);
  }
  p.alpha = 4.0;
  CHECK_NOTHROW(p.validate());
  p.omega = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  SolverConfig c;
  c.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("constant seed stays at the constant state") {
  ProblemParams p;
  p.tau = two_pi;
  SolverConfig c;
  c.initial_guess = InitialGuess::user_supplied;
  c.user_guess = RealField(PeriodicGrid(two_pi, 64), Eigen::VectorXd::Ones(64), Parity::even);
  const WaveProfile w = minimize_constrained(p, 64, c);
  CHECK((w.phi.values().array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK(w.multiplier == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("below the bifurcation the minimizer is exactly constant") {
  // alpha * omega <= (2 pi / L)^2: the constant is the minimizer, and at
  // alpha = 1 it is degenerate (L1 has the kernel cos x, sin x).
  for (double alpha : {1.0, 0.5}) {
    ProblemParams p;
    p.alpha = alpha;
    const WaveProfile w = solve_wave(p, 64);
    CHECK(w.phi.values().maxCoeff() == w.phi.values().minCoeff());
    CHECK(w.phi[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.ode_residual_norm < 1e-12);
  }
  // Just above it, a genuine wave survives the comparison.
  ProblemParams p;
  p.alpha = 1.2;
  const WaveProfile w = solve_wave(p, 64);
  CHECK(w.phi.values().maxCoeff() - w.phi.values().minCoeff() > 1e-2);
}

TEST_CASE("degenerate and non-converging descents raise") {
  ProblemParams p;
  SolverConfig c;
  c.initial_guess = InitialGuess::user_supplied;
  c.user_guess = RealField::zeros(PeriodicGrid(two_pi, 32), Parity::even);
  CHECK_THROWS_AS(minimize_constrained(p, 32, c), DegenerateSolutionError);

  SolverConfig short_run;
  short_run.max_outer_iterations = 1;
  try {
    minimize_constrained(p, 64, short_run);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate().size() == 64);
    CHECK(e.gradient_norm() > 0.0);
  }
}

TEST_CASE("even alpha = 2 minimizer is the dnoidal wave") {
  const oracle::Dnoidal dn(1.0, two_pi);
  const PeriodicGrid g(two_pi, 128);
  ProblemParams p;
  p.tau = constraint_functional(sample(g, dn), 2.0);
  SolverConfig tight;
  tight.gradient_tolerance = 1e-11;
  const WaveProfile raw = minimize_constrained(p, 128, tight);
  CHECK(l2_norm(profile_residual(raw.phi, 2.0, 1.0, raw.multiplier)) <= 1e-8);
  CHECK(raw.multiplier == doctest::Approx(2.0 * raw.functional_value / p.tau).epsilon(1e-14));

  // Lagrange stationarity: grad B parallel to grad of the constraint.
  const RealField a = 1.0 * raw.phi - second_derivative(raw.phi);
  const RealField nl = power_nonlinearity(raw.phi, 2.0);
  const double cosang = inner_product(a, nl) / (l2_norm(a) * l2_norm(nl));
  CHECK(std::acos(std::min(1.0, cosang)) <= 1e-6);

  const WaveProfile w = solve_wave(p, 128);
  std::vector<double> exact(128);
  for (int j = 0; j < 128; ++j) exact[j] = dn(g.node(j));
  CHECK(max_node_error(w.phi, exact) <= 1e-6);
  CHECK(max_node_error(w.phi, oracle::shoot_even(2.0, 1.0, two_pi, 128)) <= 1e-6);
  CHECK(w.ode_residual_norm <= 1e-10);
  CHECK(w.phi.values().minCoeff() > 0.0);
  CHECK(w.warnings.empty());
  CHECK(w.fundamental_period == doctest::Approx(two_pi));
}

TEST_CASE("even alpha = 3 matches the shooting oracle") {
  const WaveProfile w = testing_support::even_wave(3.0);
  CHECK(max_node_error(w.phi, oracle::shoot_even(3.0, 1.0, two_pi, 128)) <= 1e-6);
  CHECK(ode_residual(w.phi, 3.0, 1.0) <= 1e-8);
}

TEST_CASE("odd alpha = 2 wave") {
  const WaveProfile w = testing_support::odd_wave();
  CHECK(count_sign_changes(w.phi) == 2);
  CHECK(ode_residual(w.phi, 2.0, 4.0) <= 1e-8);
  CHECK(parity_defect(w.phi.values(), Parity::odd) <= 1e-10 * w.phi.max_abs());
  CHECK(w.phi[0] == 0.0);

  const oracle::CnoidalOdd cn(4.0, two_pi);
  std::vector<double> exact(128);
  for (int j = 0; j < 128; ++j) exact[j] = cn(w.phi.grid().node(j));
  // The wave and its negative are both minimizers; align the sign.
  const double s = w.phi[16] > 0.0 ? 1.0 : -1.0;
  CHECK(max_node_error(s * w.phi, exact) <= 1e-6);
  CHECK(max_node_error(s * w.phi, oracle::shoot_odd(2.0, 4.0, two_pi, 128)) <= 1e-6);
}

TEST_CASE("multiplier rescaling") {
  const PeriodicGrid g(two_pi, 32);
  const RealField u = sample(g, [](double x) { return 1.0 + 0.2 * std::cos(x); });
  CHECK((rescale_unit_multiplier(u, 1.0, 2.0).values() - u.values()).norm() == 0.0);
  const RealField one(g, Eigen::VectorXd::Ones(32));
  CHECK((rescale_unit_multiplier(one, 16.0, 2.0).values().array() - 4.0).abs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(rescale_unit_multiplier(one, 0.0, 2.0), InvalidMultiplierError);
  CHECK_THROWS_AS(rescale_unit_multiplier(one, -1.0, 2.0), InvalidMultiplierError);

  SUBCASE("scaling consistency bound") {
    ProblemParams p;
    p.tau = 3.0;
    const WaveProfile raw = minimize_constrained(p, 128);
    const double before = l2_norm(profile_residual(raw.phi, 2.0, 1.0, raw.multiplier));
    const WaveProfile scaled = rescale_unit_multiplier(raw);
    CHECK(scaled.ode_residual_norm <= (1.0 + std::pow(raw.multiplier, 1.5)) * before);
    CHECK(std::abs(scaled.constraint_value - constraint_functional(scaled.phi, 2.0)) <= 1e-10 * p.tau *
                                                                                          std::pow(raw.multiplier, 2.0));
  }
}

TEST_CASE("phase reduction") {
  const PeriodicGrid g(two_pi, 32);
  const RealField f = sample(g, [](double x) { return 1.0 + 0.3 * std::cos(x); }, Parity::even);
  const RealField zero = RealField::zeros(g, Parity::even);

  auto r1 = phase_reduce(zero, f, Parity::even);
  CHECK((r1.phi.values() - f.values()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(r1.theta0 == doctest::Approx(oracle::pi / 2));

  auto r2 = phase_reduce(f, zero, Parity::even);
  CHECK((r2.phi.values() - f.values()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(r2.theta0 == 0.0);

  auto r3 = phase_reduce(3.0 * f, 4.0 * f, Parity::even);
  CHECK((r3.phi.values() - 5.0 * f.values()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(r3.theta0 == doctest::Approx(std::atan2(1.0, 0.75)));

  const RealField other = sample(g, [](double x) { return std::cos(2 * x); }, Parity::even);
  CHECK_THROWS_AS(phase_reduce(f, other, Parity::even), ReductionError);
}

TEST_CASE("Newton polish") {
  SUBCASE("exact constant is a fixed point") {
    const WaveProfile c = testing_support::constant_wave(64);
    const WaveProfile w = newton_refine(c);
    CHECK(w.ode_residual_norm == 0.0);
    CHECK(w.newton_steps == 0);
    CHECK((w.phi.values() - c.phi.values()).norm() == 0.0);
  }
  SUBCASE("perturbed dnoidal converges quadratically") {
    const oracle::Dnoidal dn(1.0, two_pi);
    const PeriodicGrid g(two_pi, 128);
    RealField seed = sample(g, dn, Parity::even);
    const RealField bump = sample(g, [](double x) { return std::cos(x) + 0.5 * std::cos(2 * x); }, Parity::even);
    const double r0 = l2_norm(profile_residual(bump, 2.0, 1.0, 0.0));
    seed = seed + (1e-3 / r0) * bump;
    CHECK(ode_residual(seed, 2.0, 1.0) == doctest::Approx(1e-3).epsilon(0.5));
    WaveProfile w{.params = ProblemParams{}, .phi = seed};
    const WaveProfile out = newton_refine(w);
    CHECK(out.ode_residual_norm <= 1e-11);
    CHECK(out.newton_steps <= 6);
  }
  SUBCASE("seed outside the basin") {
    const PeriodicGrid g(two_pi, 64);
    WaveProfile w{.params = ProblemParams{}, .phi = RealField(g, Eigen::VectorXd::Constant(64, 1.5), Parity::even)};
    CHECK_THROWS_AS(newton_refine(w), BasinError);
  }
}

TEST_CASE("ode residual") {
  const PeriodicGrid g(two_pi, 128);
  CHECK(ode_residual(RealField::zeros(g), 2.0, 1.0) == 0.0);
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    const double c = std::pow(2.5, 1.0 / alpha);
    CHECK(ode_residual(RealField(g, Eigen::VectorXd::Constant(128, c)), alpha, 2.5) <= 1e-13);
  }
  const oracle::Dnoidal dn(1.0, two_pi);
  CHECK(ode_residual(sample(g, dn), 2.0, 1.0) <= 1e-10);
}

TEST_CASE("amplitude-targeted tau") {
  ProblemParams p;
  const double tau = tau_for_amplitude(p, 128, 1.5);
  p.tau = tau;
  CHECK(std::abs(minimize_constrained(p, 128).phi.max_abs() - 1.5) <= 1e-4);
}

TEST_CASE("period and sign-change diagnostics") {
  const PeriodicGrid g(two_pi, 64);
  CHECK(detect_fundamental_period(sample(g, [](double x) { return 2 + std::cos(2 * x); })) ==
        doctest::Approx(oracle::pi));
  CHECK(detect_fundamental_period(RealField(g, Eigen::VectorXd::Ones(64))) == 0.0);
  CHECK(count_sign_changes(sample(g, [](double x) { return std::sin(x); })) == 2);
  CHECK(count_sign_changes(sample(g, [](double x) { return std::sin(3 * x); })) == 6);
}

TEST_CASE("wave id") {
  CHECK(testing_support::constant_wave(64).id() == "even_a2_w1_L6.2831853_N64");
}
