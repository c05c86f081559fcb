#pragma once

// Transverse spectral problem: eigenvalues of the real block matrix
//
//     M(kappa) = [[ 0,              L2 + kappa^2 ],
//                 [ -(L1 + kappa^2), 0           ]]
//
// acting on (v1, v2), equivalently S(kappa) w = lambda J w. Any eigenvalue
// with positive real part at some kappa > 0 makes the wave transversally
// unstable.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "transverse/hill.hpp"
#include "transverse/wave.hpp"

namespace transverse {

enum class Sector { full, odd };

std::string_view to_string(Sector s);
Sector sector_from_string(std::string_view s);
Sector default_sector(const WaveProfile& wave);
BasisKind basis_of(Sector s);

// Re(lambda) above which a mode counts as unstable.
inline constexpr double kUnstableThreshold = 1e-6;
// Re(lambda) above which eigenvectors are reported and band edges are cut.
inline constexpr double kGrowthFloor = 1e-8;

struct UnstableMode {
  std::complex<double> lambda;
  Eigen::VectorXcd v1;  // coefficients in the sector basis
  Eigen::VectorXcd v2;
};

struct InstabilityResult {
  double kappa = 0.0;
  Sector sector = Sector::full;
  // Sorted by descending real part, then descending imaginary part.
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;
  int num_unstable_modes = 0;
  std::complex<double> leading_lambda;
  // Leading eigenvector folded to a real vector (phase fixed so the largest
  // component is real), unit L2 norm, first nonzero component positive.
  Eigen::VectorXd leading_v1;
  Eigen::VectorXd leading_v2;
  std::vector<UnstableMode> unstable_modes;
  // Largest relative mismatch between lambda^2 from the block solve and the
  // eigenvalues of -(L2 + kappa^2)(L1 + kappa^2) on the 10 dominant values.
  double product_mismatch = 0.0;
  // Distance of the eigenvalue set from closure under lambda -> -lambda and
  // lambda -> conj(lambda).
  double symmetry_defect = 0.0;
};

// Assembles L1 and L2 once in a sector basis and solves the block problem
// for any kappa.
class InstabilityProblem {
public:
  InstabilityProblem(const WaveProfile& wave, Sector sector);

  InstabilityResult solve(double kappa, bool with_eigenvectors = true) const;
  double max_real_part(double kappa) const;

  Eigen::MatrixXd block_matrix(double kappa) const;
  Eigen::MatrixXd shifted_L1(double kappa) const;
  Eigen::MatrixXd shifted_L2(double kappa) const;

  const ParityBasis& basis() const noexcept { return basis_; }
  const Eigen::MatrixXd& L1() const noexcept { return l1_; }
  const Eigen::MatrixXd& L2() const noexcept { return l2_; }
  Sector sector() const noexcept { return sector_; }
  const std::string& wave_id() const noexcept { return wave_id_; }

private:
  Sector sector_;
  ParityBasis basis_;
  Eigen::MatrixXd l1_;
  Eigen::MatrixXd l2_;
  std::string wave_id_;
};

// Throws NumericalConsistencyError when the block and product routes
// disagree beyond 1e-7 relative.
InstabilityResult instability_eigs(const WaveProfile& wave, double kappa, Sector sector);

double quadruple_symmetry_defect(const std::vector<std::complex<double>>& eigenvalues);

struct ScanRecord {
  double kappa = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;
  int num_unstable_modes = 0;
  std::complex<double> leading_lambda;
  Eigen::VectorXd leading_v1;
  Eigen::VectorXd leading_v2;
  double product_mismatch = 0.0;
  double symmetry_defect = 0.0;
};

struct StabilityScan {
  std::string wave_id;
  Sector sector = Sector::full;
  std::vector<double> kappa_values;
  std::vector<ScanRecord> records;
  std::vector<double> band_edges;
  bool unstable = false;
  double max_growth = 0.0;
  double kappa_at_max = 0.0;

  std::string verdict() const;
};

// workers <= 0 uses the hardware concurrency. Results do not depend on it.
StabilityScan scan_kappa(const WaveProfile& wave, double kappa_min, double kappa_max, int steps,
                         Sector sector, int workers = 0);

struct HypothesisCheck {
  bool passed = false;
  std::string details;
};

struct HypothesisReport {
  std::string wave_id;
  Sector sector = Sector::full;
  double zero_tolerance = 0.0;

  HypothesisCheck h0;
  double max_asymmetry = 0.0;

  HypothesisCheck h1;
  double lambda0 = 0.0;
  double K = 0.0;
  double beta = 0.0;
  std::vector<double> h1_kappas;

  HypothesisCheck h2;

  HypothesisCheck h3;
  double monotonicity_margin = 0.0;
  double derivative_min = 0.0;

  HypothesisCheck h4;
  int n_negative_S0 = 0;
  double simplicity_gap = 0.0;

  bool overall() const { return h0.passed && h1.passed && h2.passed && h3.passed && h4.passed; }
};

// kappa_max bounds the grid used for the monotonicity checks (default: the
// larger of 3 and K + 1).
HypothesisReport verify_hypotheses(const WaveProfile& wave, Sector sector, double kappa_max = 0.0,
                                   int steps = 60);

// Number of singular values of M(0) below tol * (1 + ||M||).
int block_kernel_dimension(const InstabilityProblem& problem, double tol = 1e-8);

}  // namespace transverse
