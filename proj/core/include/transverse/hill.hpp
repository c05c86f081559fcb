#pragma once

// Hill operators L1 = -d^2 + omega - (alpha+1)|phi|^alpha and
// L2 = -d^2 + omega - |phi|^alpha linearized about a standing wave, the
// diagonal block operator Lcal = diag(L1, L2) and
// S(kappa) = diag(L2 + kappa^2, L1 + kappa^2), with their spectra and
// negative/kernel counts.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "transverse/spectral.hpp"
#include "transverse/wave.hpp"

namespace transverse {

enum class OperatorLabel { L1, L2, Lcal, S_kappa, custom };
enum class HillKind { L1, L2 };
enum class BlockKind { Lcal, S_kappa };

std::string_view to_string(OperatorLabel l);

struct OperatorMatrix {
  BasisKind basis = BasisKind::full_fourier;
  // Dimension of the scalar basis; block operators are twice as large.
  int basis_dimension = 0;
  Eigen::MatrixXd entries;
  OperatorLabel label = OperatorLabel::custom;
  double kappa = 0.0;
  std::string wave_id;

  int size() const noexcept { return static_cast<int>(entries.rows()); }
  // max |A - A^T| / max(1, ||A||_max)
  double asymmetry() const;
};

struct SpectrumSummary {
  std::string label;
  std::vector<double> eigenvalues;  // ascending
  int n_negative = 0;
  int kernel_dimension = 0;
  double zero_tolerance = 0.0;
  // Counts changed when the tolerance was halved or doubled.
  bool ambiguous = false;
  // Columns are eigenvectors of the lowest eigenvalues, when requested.
  Eigen::MatrixXd lowest_eigenvectors;
};

// Potentials omega - (alpha+1)|phi|^alpha and omega - |phi|^alpha.
RealField hill_potential(const WaveProfile& wave, HillKind which);

OperatorMatrix build_hill(const WaveProfile& wave, HillKind which, BasisKind basis);

// Lcal = diag(L1, L2); S_kappa = diag(L2 + kappa^2, L1 + kappa^2).
OperatorMatrix build_block(const WaveProfile& wave, BlockKind kind, double kappa,
                           BasisKind basis = BasisKind::full_fourier);

// 1e-6 * (1 + |lambda_max|)
double default_zero_tolerance(double largest_magnitude);

SpectrumSummary spectrum(const OperatorMatrix& op, std::optional<double> zero_tolerance = {},
                         int keep_eigenvectors = 0);

// ||op c|| / ||c|| for the coefficient vector c of a claimed kernel element.
double kernel_residual(const OperatorMatrix& op, const Eigen::VectorXd& coefficients);

struct PropositionCheck {
  std::string name;
  bool passed = false;
  std::string expected;
  std::string observed;
};

struct PropositionReport {
  std::string wave_id;
  Parity parity = Parity::even;
  // False when the wave lies outside the propositions' setting (e.g. a
  // constant or sign-changing even profile).
  bool within_hypotheses = true;
  std::vector<std::string> notes;
  std::vector<PropositionCheck> checks;

  bool passed() const;
};

// Positive even waves: n(Lcal) = 1 (simple), z(Lcal) = 2 with kernel
// (phi', 0), (0, phi), n(L1,even) = 1, n(L2,even) = 0.
// Odd waves: n(L1) = 2 in full space; on the odd sector n(L1) = 1,
// n(L2) = 0, z(Lcal) = 1 with kernel (0, phi), and the ordering of the
// first two eigenvalues of L1,odd below those of L2,odd.
PropositionReport check_propositions(const WaveProfile& wave);

struct GridDoubling {
  int modes = 0;
  std::vector<double> coarse;
  std::vector<double> fine;
  double max_delta = 0.0;
};

// Lowest `count` eigenvalues of Lcal (odd sector for odd waves) at N and at
// 2N, the 2N wave being the spectrally interpolated and re-polished profile.
GridDoubling grid_doubling_check(const WaveProfile& wave, int count = 10,
                                 const SolverConfig& config = {});

BasisKind proposition_sector(const WaveProfile& wave);

}  // namespace transverse
