#pragma once

// Time integration of the linearized transverse perturbation
// v(x, y, t) = cos(kappa y) (v1(x, t) + i v2(x, t)):
//
//     d/dt (v1, v2) = ((L2 + kappa^2) v2, -(L1 + kappa^2) v1)
//
// and an exponential-rate fit of ||(v1, v2)||_{L2}, used to cross-check the
// scanner's leading eigenvalue.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "transverse/instability.hpp"
#include "transverse/spectral.hpp"
#include "transverse/wave.hpp"

namespace transverse {

enum class Scheme { splitting_order2, explicit_rk4 };
enum class SeedKind { leading_eigenvector, random };

std::string_view to_string(Scheme s);
std::string_view to_string(SeedKind s);
Scheme scheme_from_string(std::string_view s);
SeedKind seed_from_string(std::string_view s);

struct EvolutionConfig {
  // 0 selects 0.9 * 2.8 / spectral radius of the block matrix.
  double time_step = 0.0;
  // 0 selects a horizon long enough to complete the fit window.
  double final_time = 0.0;
  Scheme scheme = Scheme::explicit_rk4;
  SeedKind seed = SeedKind::leading_eigenvector;
  std::uint64_t random_seed = 12345;
  std::optional<Sector> sector;
  // The fit window opens once the norm has grown by window_start_growth
  // and closes after a further factor window_growth.
  double window_start_growth = 2.0;
  double window_growth = 7.38905609893065;  // e^2
};

struct GrowthMeasurement {
  double kappa = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
  double fitted_rate = 0.0;
  double fit_residual = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  bool window_complete = false;
  double scanner_lambda = 0.0;
  double relative_gap = 0.0;
  double time_step = 0.0;

  // Residual of the log-norm fit within 0.05.
  bool accepted() const { return fit_residual <= 0.05; }
};

// Physical-space evaluation of the right-hand side (spectral second
// derivative and pointwise potentials).
std::pair<RealField, RealField> linearized_rhs(const RealField& v1, const RealField& v2,
                                               const WaveProfile& wave, double kappa);

GrowthMeasurement evolve_and_fit(const WaveProfile& wave, double kappa,
                                 const EvolutionConfig& config = {});

// Evolves an explicit initial state (stacked sector coefficients of v1, v2).
GrowthMeasurement evolve_from(const InstabilityProblem& problem, double kappa,
                              const Eigen::VectorXd& initial, const EvolutionConfig& config,
                              double expected_rate = 0.0);

// Least-squares slope of log(norm) over [t0, t1] and the RMS residual.
std::pair<double, double> fit_log_slope(const std::vector<double>& times,
                                        const std::vector<double>& norms, double t0, double t1);

}  // namespace transverse
