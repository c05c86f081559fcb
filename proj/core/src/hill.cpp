#include "transverse/hill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "transverse/error.hpp"

namespace transverse {

namespace {

constexpr const char* kModule = "hill_spectra";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::pair<int, int> counts(const Eigen::VectorXd& ev, double tol) {
  int neg = 0;
  int zero = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol) ++neg;
    else if (std::abs(ev[i]) <= tol) ++zero;
  }
  return {neg, zero};
}

Eigen::MatrixXd block_diagonal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

PropositionCheck make_check(std::string name, bool ok, std::string expected, std::string observed) {
  return {std::move(name), ok, std::move(expected), std::move(observed)};
}

}  // namespace

std::string_view to_string(OperatorLabel l) {
  switch (l) {
    case OperatorLabel::L1: return "L1";
    case OperatorLabel::L2: return "L2";
    case OperatorLabel::Lcal: return "Lcal";
    case OperatorLabel::S_kappa: return "S_kappa";
    case OperatorLabel::custom: return "custom";
  }
  return "custom";
}

double OperatorMatrix::asymmetry() const {
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  return (entries - entries.transpose()).cwiseAbs().maxCoeff() / scale;
}

RealField hill_potential(const WaveProfile& wave, HillKind which) {
  const double alpha = wave.params.alpha;
  const double factor = which == HillKind::L1 ? alpha + 1.0 : 1.0;
  const RealField p = abs_power(wave.phi, alpha);
  Eigen::VectorXd v = (wave.params.omega - factor * p.values().array()).matrix();
  return RealField(wave.phi.grid(), std::move(v), p.parity());
}

OperatorMatrix build_hill(const WaveProfile& wave, HillKind which, BasisKind basis) {
  const RealField potential = hill_potential(wave, which);
  if (basis != BasisKind::full_fourier &&
      parity_defect(potential.values(), Parity::even) > 1e-10 * potential.max_abs()) {
    throw BasisError(kModule, "potential is not even; the " + std::string(to_string(basis)) +
                                  " sector is not invariant");
  }
  const ParityBasis b(basis, wave.phi.grid());
  OperatorMatrix op;
  op.basis = basis;
  op.basis_dimension = b.dimension();
  op.entries = b.hill_matrix(potential);
  op.label = which == HillKind::L1 ? OperatorLabel::L1 : OperatorLabel::L2;
  op.wave_id = wave.id();
  return op;
}

OperatorMatrix build_block(const WaveProfile& wave, BlockKind kind, double kappa, BasisKind basis) {
  if (!(kappa >= 0.0)) throw ParameterError(kModule, "kappa must be nonnegative");
  const OperatorMatrix l1 = build_hill(wave, HillKind::L1, basis);
  const OperatorMatrix l2 = build_hill(wave, HillKind::L2, basis);
  OperatorMatrix op;
  op.basis = basis;
  op.basis_dimension = l1.basis_dimension;
  op.wave_id = wave.id();
  if (kind == BlockKind::Lcal) {
    op.label = OperatorLabel::Lcal;
    op.entries = block_diagonal(l1.entries, l2.entries);
  } else {
    op.label = OperatorLabel::S_kappa;
    op.kappa = kappa;
    op.entries = block_diagonal(l2.entries, l1.entries);
    op.entries.diagonal().array() += kappa * kappa;
  }
  return op;
}

double default_zero_tolerance(double largest_magnitude) {
  return 1e-6 * (1.0 + std::abs(largest_magnitude));
}

SpectrumSummary spectrum(const OperatorMatrix& op, std::optional<double> zero_tolerance,
                         int keep_eigenvectors) {
  if (op.asymmetry() > 1e-12) throw ParameterError(kModule, "operator matrix is not symmetric");
  const auto options = keep_eigenvectors > 0 ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.entries, options);
  if (eig.info() != Eigen::Success) throw NumericalConsistencyError(kModule, "eigensolver failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();

  SpectrumSummary s;
  s.label = std::string(to_string(op.label));
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  const double lam_max = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  s.zero_tolerance = zero_tolerance.value_or(default_zero_tolerance(lam_max));
  std::tie(s.n_negative, s.kernel_dimension) = counts(ev, s.zero_tolerance);
  const auto half = counts(ev, 0.5 * s.zero_tolerance);
  const auto twice = counts(ev, 2.0 * s.zero_tolerance);
  s.ambiguous = half != std::make_pair(s.n_negative, s.kernel_dimension) ||
                twice != std::make_pair(s.n_negative, s.kernel_dimension);
  if (keep_eigenvectors > 0) {
    const int k = std::min<int>(keep_eigenvectors, static_cast<int>(ev.size()));
    s.lowest_eigenvectors = eig.eigenvectors().leftCols(k);
  }
  return s;
}

double kernel_residual(const OperatorMatrix& op, const Eigen::VectorXd& coefficients) {
  const double norm = coefficients.norm();
  if (norm == 0.0) throw ParameterError(kModule, "kernel candidate is the zero vector");
  return (op.entries * coefficients).norm() / norm;
}

bool PropositionReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

BasisKind proposition_sector(const WaveProfile& wave) {
  return wave.params.parity == Parity::odd ? BasisKind::sine : BasisKind::full_fourier;
}

PropositionReport check_propositions(const WaveProfile& wave) {
  PropositionReport rep;
  rep.wave_id = wave.id();
  rep.parity = wave.params.parity;
  const auto& phi = wave.phi;
  constexpr double kKernelTol = 1e-7;

  if (wave.params.parity == Parity::even) {
    if (!(phi.values().minCoeff() > 0.0)) {
      rep.within_hypotheses = false;
      rep.notes.push_back("even wave is not strictly positive");
    }
    if (wave.fundamental_period == 0.0) {
      rep.within_hypotheses = false;
      rep.notes.push_back("constant profile: no minimal period L, translation mode phi' vanishes");
    }

    const OperatorMatrix lcal = build_block(wave, BlockKind::Lcal, 0.0);
    const SpectrumSummary s = spectrum(lcal);
    const double tol = s.zero_tolerance;
    rep.checks.push_back(make_check("n(Lcal) = 1", s.n_negative == 1, "1", std::to_string(s.n_negative)));
    const double gap = s.eigenvalues.size() > 1 ? s.eigenvalues[1] - s.eigenvalues[0] : 0.0;
    rep.checks.push_back(make_check("negative eigenvalue simple", s.n_negative >= 1 && gap >= 10.0 * tol,
                                    ">= " + num(10.0 * tol), num(gap)));
    rep.checks.push_back(make_check("z(Lcal) = 2", s.kernel_dimension == 2, "2",
                                    std::to_string(s.kernel_dimension)));
    rep.checks.push_back(make_check("counts stable under tolerance doubling", !s.ambiguous, "stable",
                                    s.ambiguous ? "ambiguous" : "stable"));

    const ParityBasis full(BasisKind::full_fourier, phi.grid());
    const OperatorMatrix l1 = build_hill(wave, HillKind::L1, BasisKind::full_fourier);
    const OperatorMatrix l2 = build_hill(wave, HillKind::L2, BasisKind::full_fourier);
    const RealField dphi = derivative(phi, 1);
    const double dnorm = l2_norm(dphi);
    if (dnorm > 1e-12 * std::max(1.0, phi.max_abs())) {
      const double r = kernel_residual(l1, full.coefficients(dphi));
      rep.checks.push_back(make_check("L1 phi' = 0", r <= kKernelTol, "<= 1e-07 ||phi'||", num(r)));
    } else {
      rep.checks.push_back(make_check("L1 phi' = 0", false, "nonzero phi' in the kernel", "phi' = 0"));
    }
    const double r2 = kernel_residual(l2, full.coefficients(phi));
    rep.checks.push_back(make_check("L2 phi = 0", r2 <= kKernelTol, "<= 1e-07 ||phi||", num(r2)));

    const SpectrumSummary l1e = spectrum(build_hill(wave, HillKind::L1, BasisKind::cosine));
    const SpectrumSummary l2e = spectrum(build_hill(wave, HillKind::L2, BasisKind::cosine));
    rep.checks.push_back(make_check("n(L1,even) = 1", l1e.n_negative == 1, "1", std::to_string(l1e.n_negative)));
    rep.checks.push_back(make_check("n(L2,even) = 0", l2e.n_negative == 0, "0", std::to_string(l2e.n_negative)));
    return rep;
  }

  // Odd waves.
  if (count_sign_changes(phi) == 0) {
    rep.within_hypotheses = false;
    rep.notes.push_back("odd wave does not change sign");
  }
  const SpectrumSummary l1full = spectrum(build_hill(wave, HillKind::L1, BasisKind::full_fourier));
  rep.checks.push_back(make_check("n(L1) = 2 (full space)", l1full.n_negative == 2, "2",
                                  std::to_string(l1full.n_negative)));

  const OperatorMatrix l1o = build_hill(wave, HillKind::L1, BasisKind::sine);
  const OperatorMatrix l2o = build_hill(wave, HillKind::L2, BasisKind::sine);
  const SpectrumSummary s1 = spectrum(l1o);
  const SpectrumSummary s2 = spectrum(l2o);
  const SpectrumSummary sc = spectrum(build_block(wave, BlockKind::Lcal, 0.0, BasisKind::sine));
  const double tol = sc.zero_tolerance;
  rep.checks.push_back(make_check("n(L1,odd) = 1", s1.n_negative == 1, "1", std::to_string(s1.n_negative)));
  rep.checks.push_back(make_check("n(L2,odd) = 0", s2.n_negative == 0, "0", std::to_string(s2.n_negative)));
  rep.checks.push_back(make_check("z(Lcal,odd) = 1", sc.kernel_dimension == 1, "1",
                                  std::to_string(sc.kernel_dimension)));
  rep.checks.push_back(make_check("n(Lcal,odd) = 1", sc.n_negative == 1, "1", std::to_string(sc.n_negative)));
  const ParityBasis sine(BasisKind::sine, phi.grid());
  const double r2 = kernel_residual(l2o, sine.coefficients(phi));
  rep.checks.push_back(make_check("L2 phi = 0", r2 <= kKernelTol, "<= 1e-07 ||phi||", num(r2)));

  const double m0 = s2.eigenvalues[0] - s1.eigenvalues[0];
  const double m1 = s2.eigenvalues[1] - s1.eigenvalues[1];
  rep.checks.push_back(make_check("lambda0(L1,odd) < lambda0(L2,odd)", m0 >= 10.0 * tol,
                                  "margin >= " + num(10.0 * tol), num(m0)));
  rep.checks.push_back(make_check("lambda1(L1,odd) < lambda1(L2,odd)", m1 >= 10.0 * tol,
                                  "margin >= " + num(10.0 * tol), num(m1)));
  return rep;
}

GridDoubling grid_doubling_check(const WaveProfile& wave, int count, const SolverConfig& config) {
  const BasisKind sector = proposition_sector(wave);
  WaveProfile fine = wave;
  fine.phi = resample(wave.phi, 2 * wave.phi.size());
  fine = newton_refine(fine, config);

  const auto coarse_s = spectrum(build_block(wave, BlockKind::Lcal, 0.0, sector));
  const auto fine_s = spectrum(build_block(fine, BlockKind::Lcal, 0.0, sector));
  GridDoubling g;
  g.modes = wave.phi.size();
  const int k = std::min<int>(count, static_cast<int>(coarse_s.eigenvalues.size()));
  for (int i = 0; i < k; ++i) {
    g.coarse.push_back(coarse_s.eigenvalues[i]);
    g.fine.push_back(fine_s.eigenvalues[i]);
    g.max_delta = std::max(g.max_delta, std::abs(g.fine.back() - g.coarse.back()));
  }
  return g;
}

}  // namespace transverse
