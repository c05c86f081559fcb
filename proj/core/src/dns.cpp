#include "transverse/dns.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "transverse/error.hpp"
#include "transverse/hill.hpp"

namespace transverse {

namespace {

constexpr const char* kModule = "dns_validator";
constexpr int kMaxRecords = 4000;

RealField apply_shifted_hill(const RealField& v, const RealField& potential, double kappa) {
  Eigen::VectorXd w = -second_derivative(RealField(v.grid(), v.values())).values();
  w.array() += (potential.values().array() + kappa * kappa) * v.values().array();
  return RealField(v.grid(), std::move(w));
}

}  // namespace

std::string_view to_string(Scheme s) {
  return s == Scheme::splitting_order2 ? "splitting_order2" : "explicit_rk4";
}

std::string_view to_string(SeedKind s) {
  return s == SeedKind::random ? "random" : "leading_eigenvector";
}

Scheme scheme_from_string(std::string_view s) {
  if (s == "splitting_order2") return Scheme::splitting_order2;
  if (s == "explicit_rk4") return Scheme::explicit_rk4;
  throw ParameterError(kModule, "unknown scheme '" + std::string(s) + "'");
}

SeedKind seed_from_string(std::string_view s) {
  if (s == "leading_eigenvector") return SeedKind::leading_eigenvector;
  if (s == "random") return SeedKind::random;
  throw ParameterError(kModule, "unknown seed '" + std::string(s) + "'");
}

std::pair<RealField, RealField> linearized_rhs(const RealField& v1, const RealField& v2,
                                               const WaveProfile& wave, double kappa) {
  if (!(v1.grid() == wave.phi.grid()) || !(v2.grid() == wave.phi.grid()))
    throw ParameterError(kModule, "perturbation fields are not on the wave's grid");
  const RealField p1 = hill_potential(wave, HillKind::L1);
  const RealField p2 = hill_potential(wave, HillKind::L2);
  RealField dv1 = apply_shifted_hill(v2, p2, kappa);
  RealField dv2 = -1.0 * apply_shifted_hill(v1, p1, kappa);
  return {std::move(dv1), std::move(dv2)};
}

std::pair<double, double> fit_log_slope(const std::vector<double>& times,
                                        const std::vector<double>& norms, double t0, double t1) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t1) continue;
    const double y = std::log(norms[i]);
    sx += times[i];
    sy += y;
    sxx += times[i] * times[i];
    sxy += times[i] * y;
    ++n;
  }
  if (n < 2) throw ParameterError(kModule, "fit window holds fewer than two samples");
  const double denom = n * sxx - sx * sx;
  const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t1) continue;
    const double e = std::log(norms[i]) - (intercept + slope * times[i]);
    ss += e * e;
  }
  return {slope, std::sqrt(ss / n)};
}

GrowthMeasurement evolve_from(const InstabilityProblem& problem, double kappa,
                              const Eigen::VectorXd& initial, const EvolutionConfig& config,
                              double expected_rate) {
  const Eigen::MatrixXd a = problem.shifted_L2(kappa);
  const Eigen::MatrixXd b = problem.shifted_L1(kappa);
  const Eigen::MatrixXd m = problem.block_matrix(kappa);
  const Eigen::Index d = a.rows();
  if (initial.size() != 2 * d) throw ParameterError(kModule, "initial state has the wrong size");
  const double n0 = initial.norm();
  if (!(n0 > 0.0)) throw ParameterError(kModule, "initial state is zero");

  const Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  const double bound = config.scheme == Scheme::explicit_rk4 ? 2.8 / radius : 2.0 / radius;
  const double dt = config.time_step > 0.0 ? config.time_step : 0.9 * bound;
  if (dt > bound) {
    throw ParameterError(kModule, "time step " + std::to_string(dt) + " exceeds the stability bound " +
                                      std::to_string(bound));
  }

  double horizon = config.final_time;
  if (horizon <= 0.0) {
    horizon = expected_rate > kUnstableThreshold
                  ? 3.0 * std::log(config.window_start_growth * config.window_growth) / expected_rate + 5.0
                  : 20.0;
  }
  if (horizon < 10.0 * dt) throw ParameterError(kModule, "final time must be at least 10 time steps");
  const long total = static_cast<long>(std::ceil(horizon / dt));
  const long stride = std::max<long>(1, total / kMaxRecords);
  const double growth_cap_rate = 3.0 * std::max(expected_rate, 0.1);

  GrowthMeasurement g;
  g.kappa = kappa;
  g.time_step = dt;
  Eigen::VectorXd v = initial;
  g.times.push_back(0.0);
  g.norms.push_back(n0);

  bool started = false;
  double start_norm = 0.0;
  Eigen::VectorXd k1(2 * d), k2(2 * d), k3(2 * d), k4(2 * d);
  for (long step = 1; step <= total; ++step) {
    if (config.scheme == Scheme::explicit_rk4) {
      k1.noalias() = m * v;
      k2.noalias() = m * (v + 0.5 * dt * k1);
      k3.noalias() = m * (v + 0.5 * dt * k2);
      k4.noalias() = m * (v + dt * k3);
      v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      // Strang splitting of the two nilpotent halves, each solved exactly.
      v.tail(d) -= 0.5 * dt * (b * v.head(d));
      v.head(d) += dt * (a * v.tail(d));
      v.tail(d) -= 0.5 * dt * (b * v.head(d));
    }
    const double t = step * dt;
    const double norm = v.norm();
    if (!std::isfinite(norm) || norm > 10.0 * n0 * std::exp(growth_cap_rate * t)) {
      throw IntegratorError(kModule, "norm grew faster than the spectral bound at t = " +
                                         std::to_string(t) + "; reduce the time step");
    }
    bool done = false;
    if (!started && norm >= config.window_start_growth * n0) {
      started = true;
      start_norm = norm;
      g.window_start = t;
    } else if (started && norm >= config.window_growth * start_norm) {
      g.window_end = t;
      g.window_complete = true;
      done = true;
    }
    if (step % stride == 0 || done || step == total || (started && g.window_start == t)) {
      g.times.push_back(t);
      g.norms.push_back(norm);
    }
    if (done) break;
  }

  if (!started) {
    g.window_start = 0.0;
    g.window_end = g.times.back();
  } else if (!g.window_complete) {
    g.window_end = g.times.back();
  }
  std::tie(g.fitted_rate, g.fit_residual) = fit_log_slope(g.times, g.norms, g.window_start, g.window_end);
  return g;
}

GrowthMeasurement evolve_and_fit(const WaveProfile& wave, double kappa, const EvolutionConfig& config) {
  if (!(kappa > 0.0)) throw ParameterError(kModule, "kappa must be positive");
  const Sector sector = config.sector.value_or(default_sector(wave));
  const InstabilityProblem problem(wave, sector);
  const InstabilityResult eig = problem.solve(kappa);
  const double lambda = eig.max_real_part;

  const Eigen::Index d = problem.L1().rows();
  Eigen::VectorXd seed(2 * d);
  if (config.seed == SeedKind::leading_eigenvector) {
    seed << eig.leading_v1, eig.leading_v2;
  } else {
    std::mt19937_64 rng(config.random_seed);
    std::normal_distribution<double> gauss;
    for (Eigen::Index i = 0; i < seed.size(); ++i) seed[i] = gauss(rng);
    seed.normalize();
  }

  GrowthMeasurement g = evolve_from(problem, kappa, seed, config, lambda);
  g.scanner_lambda = lambda;
  g.relative_gap = lambda > kUnstableThreshold ? std::abs(g.fitted_rate - lambda) / lambda
                                               : std::abs(g.fitted_rate - lambda);
  return g;
}

}  // namespace transverse
