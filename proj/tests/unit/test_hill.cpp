#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "transverse/error.hpp"
#include "transverse/hill.hpp"
#include "waves.hpp"

using namespace transverse;
using testing_support::constant_wave;

namespace {

// n^2 + shift over the integers |n| < N/2 and the Nyquist index, sorted.
std::vector<double> integer_spectrum(int modes, double shift) {
  std::vector<double> v;
  for (int n = -modes / 2 + 1; n <= modes / 2; ++n) v.push_back(double(n) * n + shift);
  std::sort(v.begin(), v.end());
  return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("constant wave: analytic Hill spectra") {
  const WaveProfile w = constant_wave(64);
  const SpectrumSummary l1 = spectrum(build_hill(w, HillKind::L1, BasisKind::full_fourier));
  const SpectrumSummary l2 = spectrum(build_hill(w, HillKind::L2, BasisKind::full_fourier));
  CHECK(max_diff(l1.eigenvalues, integer_spectrum(64, -2.0)) <= 1e-10);
  CHECK(max_diff(l2.eigenvalues, integer_spectrum(64, 0.0)) <= 1e-10);
  CHECK(l1.n_negative == 3);
  CHECK(l1.kernel_dimension == 0);
  CHECK(l2.n_negative == 0);
  CHECK(l2.kernel_dimension == 1);
  CHECK_FALSE(l1.ambiguous);

  const OperatorMatrix m = build_hill(w, HillKind::L1, BasisKind::full_fourier);
  CHECK((m.entries - Eigen::MatrixXd(m.entries.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.label == OperatorLabel::L1);
  CHECK(m.wave_id == w.id());
}

TEST_CASE("S(kappa) structure") {
  const WaveProfile w = testing_support::even_wave(2.0, 64);
  const auto s0 = spectrum(build_block(w, BlockKind::S_kappa, 0.0)).eigenvalues;
  auto merged = spectrum(build_hill(w, HillKind::L1, BasisKind::full_fourier)).eigenvalues;
  const auto l2 = spectrum(build_hill(w, HillKind::L2, BasisKind::full_fourier)).eigenvalues;
  merged.insert(merged.end(), l2.begin(), l2.end());
  std::sort(merged.begin(), merged.end());
  CHECK(max_diff(s0, merged) <= 1e-12 * (1.0 + std::abs(s0.back())));

  for (double kappa : {0.3, 1.0, 2.5}) {
    const OperatorMatrix sk = build_block(w, BlockKind::S_kappa, kappa);
    CHECK(sk.size() == 128);
    CHECK(sk.asymmetry() <= 1e-12);
    auto shifted = s0;
    for (auto& x : shifted) x += kappa * kappa;
    const auto sks = spectrum(sk).eigenvalues;
    CHECK(max_diff(sks, shifted) <= 1e-12 * (1.0 + std::abs(sks.back())));
    CHECK(std::abs((sks.front() - s0.front()) - kappa * kappa) <= 1e-12 * (1.0 + std::abs(sks.back())));
  }
  CHECK_THROWS_AS(build_block(w, BlockKind::S_kappa, -1.0), ParameterError);

  const WaveProfile c = constant_wave(64);
  CHECK(spectrum(build_block(c, BlockKind::S_kappa, 2.0)).eigenvalues.front() == doctest::Approx(2.0));
}

TEST_CASE("parity blocks merge into the full spectrum") {
  const WaveProfile w = testing_support::even_wave(3.0, 64);
  for (HillKind k : {HillKind::L1, HillKind::L2}) {
    auto merged = spectrum(build_hill(w, k, BasisKind::cosine)).eigenvalues;
    const auto s = spectrum(build_hill(w, k, BasisKind::sine)).eigenvalues;
    merged.insert(merged.end(), s.begin(), s.end());
    std::sort(merged.begin(), merged.end());
    CHECK(max_diff(merged, spectrum(build_hill(w, k, BasisKind::full_fourier)).eigenvalues) <= 1e-10);
  }
}

TEST_CASE("a shifted profile has no parity sectors") {
  WaveProfile w = testing_support::even_wave(2.0, 64);
  const auto& g = w.phi.grid();
  Eigen::VectorXd v(64);
  for (int j = 0; j < 64; ++j) v[j] = w.phi[(j + 5) % 64];
  w.phi = RealField(g, v);
  CHECK_THROWS_AS(build_hill(w, HillKind::L1, BasisKind::cosine), BasisError);
  CHECK_NOTHROW(build_hill(w, HillKind::L1, BasisKind::full_fourier));
}

TEST_CASE("kernel residuals and zero tolerance") {
  CHECK(default_zero_tolerance(-4.0) == doctest::Approx(5e-6));
  const WaveProfile w = testing_support::even_wave();
  const ParityBasis full(BasisKind::full_fourier, w.phi.grid());
  const RealField dphi = derivative(w.phi, 1);
  CHECK(kernel_residual(build_hill(w, HillKind::L1, BasisKind::full_fourier), full.coefficients(dphi)) <= 1e-7);
  CHECK(kernel_residual(build_hill(w, HillKind::L2, BasisKind::full_fourier), full.coefficients(w.phi)) <= 1e-7);
  CHECK_THROWS_AS(kernel_residual(build_hill(w, HillKind::L2, BasisKind::full_fourier), Eigen::VectorXd::Zero(128)),
                  ParameterError);

  const SpectrumSummary s = spectrum(build_hill(w, HillKind::L1, BasisKind::full_fourier), std::nullopt, 3);
  CHECK(s.lowest_eigenvectors.cols() == 3);
  CHECK(s.zero_tolerance == doctest::Approx(default_zero_tolerance(s.eigenvalues.back())));
}

TEST_CASE("Proposition checks on the even alpha = 2 wave") {
  const WaveProfile w = testing_support::even_wave();
  const PropositionReport r = check_propositions(w);
  for (const auto& c : r.checks) {
    INFO(c.name << ": expected " << c.expected << ", observed " << c.observed);
    CHECK(c.passed);
  }
  CHECK(r.within_hypotheses);
  CHECK(r.passed());
}

TEST_CASE("Proposition checks on the odd alpha = 2 wave") {
  const WaveProfile w = testing_support::odd_wave();
  const PropositionReport r = check_propositions(w);
  for (const auto& c : r.checks) {
    INFO(c.name << ": expected " << c.expected << ", observed " << c.observed);
    CHECK(c.passed);
  }
  CHECK(r.passed());
  CHECK(spectrum(build_hill(w, HillKind::L1, BasisKind::full_fourier)).n_negative == 2);
}

TEST_CASE("constant wave is flagged outside the propositions") {
  const PropositionReport r = check_propositions(constant_wave(64));
  CHECK_FALSE(r.within_hypotheses);
  CHECK_FALSE(r.passed());
  const auto it = std::find_if(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.name == "n(Lcal) = 1"; });
  REQUIRE(it != r.checks.end());
  CHECK(it->observed == "3");
}

TEST_CASE("grid doubling leaves the low spectrum unchanged") {
  const GridDoubling even = grid_doubling_check(testing_support::even_wave());
  CHECK(even.coarse.size() == 10);
  CHECK(even.max_delta <= 1e-9);
  const GridDoubling odd = grid_doubling_check(testing_support::odd_wave());
  CHECK(odd.max_delta <= 1e-9);
}
