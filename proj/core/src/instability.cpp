#include "transverse/instability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "parallel.hpp"
#include "transverse/error.hpp"

namespace transverse {

namespace {

constexpr const char* kModule = "instability_scanner";
constexpr double kProductTolerance = 1e-7;
constexpr int kDominantCount = 10;
constexpr double kEdgeResolution = 1e-6;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool descending(const std::complex<double>& a, const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

double rounding_slack(const Eigen::MatrixXd& m) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, m.cwiseAbs().maxCoeff());
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

// Phase-fixes a complex eigenvector so its largest component is real and
// positive, then keeps the real part with unit norm and a positive first
// nonzero entry.
Eigen::VectorXd fold_to_real(const Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const std::complex<double> phase = std::conj(v[imax]) / std::abs(v[imax]);
  Eigen::VectorXd r = (v * phase).real();
  const double n = r.norm();
  if (n > 0.0) r /= n;
  const double cut = 1e-12 * r.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (std::abs(r[i]) > cut) {
      if (r[i] < 0.0) r = -r;
      break;
    }
  }
  return r;
}

double product_route_mismatch(const std::vector<std::complex<double>>& block,
                              const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd prod = -(a * b);
  const Eigen::EigenSolver<Eigen::MatrixXd> es(prod, false);
  std::vector<std::complex<double>> mu(es.eigenvalues().data(),
                                      es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(mu.begin(), mu.end(),
            [](const auto& x, const auto& y) { return std::abs(x) > std::abs(y); });
  double worst = 0.0;
  const int k = std::min<int>(kDominantCount, static_cast<int>(mu.size()));
  for (int i = 0; i < k; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : block) best = std::min(best, std::abs(l * l - mu[i]));
    worst = std::max(worst, best / std::max(std::abs(mu[i]), 1e-300));
  }
  return worst;
}

}  // namespace

std::string_view to_string(Sector s) { return s == Sector::odd ? "odd" : "full"; }

Sector sector_from_string(std::string_view s) {
  if (s == "full") return Sector::full;
  if (s == "odd") return Sector::odd;
  throw ParameterError(kModule, "unknown sector '" + std::string(s) + "'");
}

Sector default_sector(const WaveProfile& wave) {
  return wave.params.parity == Parity::odd ? Sector::odd : Sector::full;
}

BasisKind basis_of(Sector s) { return s == Sector::odd ? BasisKind::sine : BasisKind::full_fourier; }

double quadruple_symmetry_defect(const std::vector<std::complex<double>>& ev) {
  double worst = 0.0;
  for (const auto& l : ev) {
    double to_neg = std::numeric_limits<double>::infinity();
    double to_conj = std::numeric_limits<double>::infinity();
    for (const auto& m : ev) {
      to_neg = std::min(to_neg, std::abs(m + l));
      to_conj = std::min(to_conj, std::abs(m - std::conj(l)));
    }
    worst = std::max({worst, to_neg, to_conj});
  }
  return worst;
}

InstabilityProblem::InstabilityProblem(const WaveProfile& wave, Sector sector)
    : sector_(sector), basis_(basis_of(sector), wave.phi.grid()), wave_id_(wave.id()) {
  l1_ = build_hill(wave, HillKind::L1, basis_of(sector)).entries;
  l2_ = build_hill(wave, HillKind::L2, basis_of(sector)).entries;
}

Eigen::MatrixXd InstabilityProblem::shifted_L1(double kappa) const {
  Eigen::MatrixXd m = l1_;
  m.diagonal().array() += kappa * kappa;
  return m;
}

Eigen::MatrixXd InstabilityProblem::shifted_L2(double kappa) const {
  Eigen::MatrixXd m = l2_;
  m.diagonal().array() += kappa * kappa;
  return m;
}

Eigen::MatrixXd InstabilityProblem::block_matrix(double kappa) const {
  const Eigen::Index d = l1_.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  m.topRightCorner(d, d) = shifted_L2(kappa);
  m.bottomLeftCorner(d, d) = -shifted_L1(kappa);
  return m;
}

InstabilityResult InstabilityProblem::solve(double kappa, bool with_eigenvectors) const {
  if (!(kappa >= 0.0)) throw ParameterError(kModule, "kappa must be nonnegative");
  const Eigen::Index d = l1_.rows();
  const Eigen::EigenSolver<Eigen::MatrixXd> es(block_matrix(kappa), with_eigenvectors);
  if (es.info() != Eigen::Success) throw NumericalConsistencyError(kModule, "eigensolver failed");

  InstabilityResult r;
  r.kappa = kappa;
  r.sector = sector_;
  const auto& vals = es.eigenvalues();
  std::vector<Eigen::Index> order(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return descending(vals[a], vals[b]); });
  for (const auto i : order) r.eigenvalues.push_back(vals[i]);

  // The spectrum is symmetric under lambda -> -lambda, so max Re >= 0.
  r.max_real_part = std::max(0.0, r.eigenvalues.front().real());
  r.leading_lambda = r.eigenvalues.front();
  r.num_unstable_modes = static_cast<int>(std::count_if(
      r.eigenvalues.begin(), r.eigenvalues.end(),
      [](const auto& l) { return l.real() > kUnstableThreshold; }));
  r.symmetry_defect = quadruple_symmetry_defect(r.eigenvalues);
  r.product_mismatch = product_route_mismatch(r.eigenvalues, shifted_L2(kappa), shifted_L1(kappa));

  if (with_eigenvectors) {
    const Eigen::MatrixXcd vecs = es.eigenvectors();
    const Eigen::VectorXd lead = fold_to_real(vecs.col(order.front()));
    r.leading_v1 = lead.head(d);
    r.leading_v2 = lead.tail(d);
    for (const auto i : order) {
      if (vals[i].real() <= kGrowthFloor) break;
      r.unstable_modes.push_back({vals[i], vecs.col(i).head(d), vecs.col(i).tail(d)});
    }
  }
  return r;
}

double InstabilityProblem::max_real_part(double kappa) const {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(block_matrix(kappa), false);
  return std::max(0.0, es.eigenvalues().real().maxCoeff());
}

InstabilityResult instability_eigs(const WaveProfile& wave, double kappa, Sector sector) {
  const InstabilityProblem problem(wave, sector);
  InstabilityResult r = problem.solve(kappa);
  if (r.product_mismatch > kProductTolerance) {
    throw NumericalConsistencyError(kModule, "block and product eigenvalue routes disagree (" +
                                                 num(r.product_mismatch) + " relative)");
  }
  return r;
}

std::string StabilityScan::verdict() const {
  return unstable ? "transversally unstable" : "no transverse instability detected";
}

StabilityScan scan_kappa(const WaveProfile& wave, double kappa_min, double kappa_max, int steps,
                         Sector sector, int workers) {
  if (!(kappa_min >= 0.0) || !(kappa_max > kappa_min))
    throw ParameterError(kModule, "need 0 <= kappa_min < kappa_max");
  if (steps < 2) throw ParameterError(kModule, "need at least 2 kappa steps");

  const InstabilityProblem problem(wave, sector);
  StabilityScan scan;
  scan.wave_id = wave.id();
  scan.sector = sector;
  scan.kappa_values.resize(steps);
  for (int i = 0; i < steps; ++i)
    scan.kappa_values[i] = kappa_min + (kappa_max - kappa_min) * i / (steps - 1);
  scan.records.resize(steps);

  detail::parallel_for(steps, workers, [&](int i) {
    const InstabilityResult r = problem.solve(scan.kappa_values[i]);
    if (r.product_mismatch > kProductTolerance) {
      throw NumericalConsistencyError(kModule, "block and product routes disagree at kappa = " +
                                                   num(r.kappa));
    }
    scan.records[i] = {r.kappa,           r.eigenvalues,     r.max_real_part,
                       r.num_unstable_modes, r.leading_lambda, r.leading_v1,
                       r.leading_v2,      r.product_mismatch, r.symmetry_defect};
  });

  for (const auto& rec : scan.records) {
    if (rec.max_real_part > scan.max_growth) {
      scan.max_growth = rec.max_real_part;
      scan.kappa_at_max = rec.kappa;
    }
    if (rec.max_real_part > kUnstableThreshold && rec.kappa > 0.0) scan.unstable = true;
  }

  std::vector<std::pair<double, double>> brackets;
  for (int i = 0; i + 1 < steps; ++i) {
    const bool a = scan.records[i].max_real_part > kGrowthFloor;
    const bool b = scan.records[i + 1].max_real_part > kGrowthFloor;
    if (a != b) brackets.emplace_back(scan.kappa_values[i], scan.kappa_values[i + 1]);
  }
  scan.band_edges.resize(brackets.size());
  detail::parallel_for(static_cast<int>(brackets.size()), workers, [&](int e) {
    auto [lo, hi] = brackets[e];
    const bool lo_unstable = problem.max_real_part(lo) > kGrowthFloor;
    while (hi - lo > kEdgeResolution) {
      const double mid = 0.5 * (lo + hi);
      if ((problem.max_real_part(mid) > kGrowthFloor) == lo_unstable) lo = mid;
      else hi = mid;
    }
    scan.band_edges[e] = 0.5 * (lo + hi);
  });
  return scan;
}

HypothesisReport verify_hypotheses(const WaveProfile& wave, Sector sector, double kappa_max,
                                   int steps) {
  HypothesisReport rep;
  rep.wave_id = wave.id();
  rep.sector = sector;
  const InstabilityProblem problem(wave, sector);
  const BasisKind basis = basis_of(sector);

  const OperatorMatrix s0 = build_block(wave, BlockKind::S_kappa, 0.0, basis);
  const SpectrumSummary s0_spec = spectrum(s0);
  rep.zero_tolerance = s0_spec.zero_tolerance;
  const double min0 = s0_spec.eigenvalues.front();

  // H1 first: K fixes the default kappa range of the other checks.
  rep.lambda0 = -min0;
  rep.K = rep.lambda0 > 0.0 ? std::sqrt(rep.lambda0) * (1.0 + 1e-6) : 1.0;
  rep.beta = rep.K * rep.K + min0;
  if (kappa_max <= 0.0) kappa_max = std::max(3.0, rep.K + 1.0);

  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i) grid[i] = kappa_max * i / (steps - 1);

  // H0
  for (const double k : grid) {
    rep.max_asymmetry =
        std::max(rep.max_asymmetry, build_block(wave, BlockKind::S_kappa, k, basis).asymmetry());
  }
  rep.h0.passed = rep.max_asymmetry <= 1e-12;
  rep.h0.details = "max |S - S^T| / ||S|| = " + num(rep.max_asymmetry) + " over " +
                   std::to_string(steps) + " kappa values";

  // H1
  bool h1 = rep.beta > 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 8; ++i) {
    const double k = rep.K + 0.25 * i;
    const Eigen::MatrixXd s = build_block(wave, BlockKind::S_kappa, k, basis).entries;
    const double m = min_eigenvalue(s);
    rep.h1_kappas.push_back(k);
    worst = std::min(worst, m - rep.beta);
    if (m < rep.beta - rounding_slack(s)) h1 = false;
  }
  rep.h1.passed = h1;
  rep.h1.details = "lambda0 = " + num(rep.lambda0) + ", K = " + num(rep.K) + ", beta = " +
                   num(rep.beta) + ", min over grid of (min spec S(kappa) - beta) = " + num(worst);

  // H2
  rep.h2.passed = true;
  rep.h2.details = "periodic: essential spectrum empty";

  // H3
  std::vector<double> mins(steps);
  double slack = 0.0;
  for (int i = 0; i < steps; ++i) {
    const Eigen::MatrixXd s = build_block(wave, BlockKind::S_kappa, grid[i], basis).entries;
    mins[i] = min_eigenvalue(s);
    slack = std::max(slack, rounding_slack(s));
  }
  rep.monotonicity_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < steps; ++i)
    rep.monotonicity_margin = std::min(rep.monotonicity_margin, mins[i + 1] - mins[i]);
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> gauss;
  rep.derivative_min = std::numeric_limits<double>::infinity();
  const Eigen::Index dim = s0.entries.rows();
  for (int i = 1; i < steps; ++i) {
    const double k = grid[i];
    const double h = 1e-4 * std::max(k, 1e-2);
    const Eigen::MatrixXd ds = (build_block(wave, BlockKind::S_kappa, k + h, basis).entries -
                                build_block(wave, BlockKind::S_kappa, k - h, basis).entries) /
                               (2.0 * h);
    for (int s = 0; s < 5; ++s) {
      Eigen::VectorXd w(dim);
      for (Eigen::Index j = 0; j < dim; ++j) w[j] = gauss(rng);
      rep.derivative_min = std::min(rep.derivative_min, w.dot(ds * w) / w.squaredNorm() / (2.0 * k));
    }
  }
  rep.h3.passed = rep.monotonicity_margin >= -slack && rep.derivative_min > 0.0;
  rep.h3.details = "min_k [min spec S(k_{i+1}) - min spec S(k_i)] = " + num(rep.monotonicity_margin) +
                   "; min (S'(k)w, w) / (2k ||w||^2) = " + num(rep.derivative_min);

  // H4
  rep.n_negative_S0 = s0_spec.n_negative;
  rep.simplicity_gap =
      s0_spec.eigenvalues.size() > 1 ? s0_spec.eigenvalues[1] - s0_spec.eigenvalues[0] : 0.0;
  rep.h4.passed = s0_spec.n_negative == 1 && rep.simplicity_gap >= 10.0 * rep.zero_tolerance &&
                  !s0_spec.ambiguous;
  rep.h4.details = "n(S(0)) = " + std::to_string(s0_spec.n_negative) + " in the " +
                   std::string(to_string(sector)) + " sector, gap to next eigenvalue " +
                   num(rep.simplicity_gap) + " (need >= " + num(10.0 * rep.zero_tolerance) + ")";
  return rep;
}

int block_kernel_dimension(const InstabilityProblem& problem, double tol) {
  const Eigen::MatrixXd m = problem.block_matrix(0.0);
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = tol * (1.0 + sv[0]);
  return static_cast<int>((sv.array() <= cut).count());
}

}  // namespace transverse
