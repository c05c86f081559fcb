#include "doctest.h"

#include <cmath>

#include "transverse/error.hpp"
#include "transverse/instability.hpp"
#include "transverse/io.hpp"
#include "waves.hpp"

using namespace transverse;
using testing_support::constant_wave;
using testing_support::two_pi;

namespace {

// Constant wave phi = omega^{1/alpha}: mode xi has
// lambda^2 = -(xi^2 + kappa^2)(xi^2 + kappa^2 - alpha omega).
double constant_growth(double kappa, double alpha = 2.0, double omega = 1.0, double period = two_pi,
                       int modes = 64) {
  double best = 0.0;
  for (int n = 0; n <= modes / 2; ++n) {
    const double xi = two_pi * n / period;
    const double s = xi * xi + kappa * kappa;
    if (s < alpha * omega) best = std::max(best, std::sqrt((alpha * omega - s) * s));
  }
  return best;
}

}  // namespace

TEST_CASE("constant wave growth rates") {
  const WaveProfile w = constant_wave(64);
  const InstabilityResult r1 = instability_eigs(w, 1.0, Sector::full);
  CHECK(std::abs(r1.max_real_part - 1.0) <= 1e-8);
  CHECK(r1.num_unstable_modes == 1);
  CHECK(std::abs(r1.leading_lambda - std::complex<double>(1.0, 0.0)) <= 1e-8);
  // Modes n = +-1 sit exactly on the band edge (a Jordan block at 0), so
  // rounding may lift them just above the 1e-8 eigenvector floor.
  REQUIRE_FALSE(r1.unstable_modes.empty());
  CHECK(std::abs(r1.unstable_modes.front().lambda - 1.0) <= 1e-8);
  for (double kappa : {0.5, 1.3, 0.2}) {
    CHECK(std::abs(instability_eigs(w, kappa, Sector::full).max_real_part - constant_growth(kappa)) <= 1e-8);
  }
  const InstabilityResult r2 = instability_eigs(w, 2.0, Sector::full);
  CHECK(r2.max_real_part <= 1e-9);
  CHECK(r2.num_unstable_modes == 0);
  CHECK(r2.unstable_modes.empty());
}

TEST_CASE("leading eigenvector normalisation") {
  const WaveProfile w = testing_support::even_wave(2.0, 64);
  const InstabilityProblem p(w, Sector::full);
  const InstabilityResult r = p.solve(1.0);
  const double n = std::sqrt(r.leading_v1.squaredNorm() + r.leading_v2.squaredNorm());
  CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::VectorXd v(r.leading_v1.size() * 2);
  v << r.leading_v1, r.leading_v2;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      CHECK(v[i] > 0.0);
      break;
    }
  }
  // A real leading eigenvalue gives a real eigenvector: M v = lambda v.
  REQUIRE(std::abs(r.leading_lambda.imag()) < 1e-10);
  CHECK((p.block_matrix(1.0) * v - r.leading_lambda.real() * v).norm() <= 1e-8);
}

TEST_CASE("structural invariants on the even wave") {
  const WaveProfile w = testing_support::even_wave();
  const InstabilityProblem p(w, Sector::full);
  for (double kappa : {0.0, 0.4, 1.0, 1.7, 3.0}) {
    const InstabilityResult r = p.solve(kappa);
    CHECK(r.symmetry_defect <= 1e-8);
    CHECK(r.product_mismatch <= 1e-7);
  }
  CHECK(quadruple_symmetry_defect({{1.0, 2.0}, {-1.0, 2.0}, {1.0, -2.0}, {-1.0, -2.0}}) == 0.0);
  CHECK(quadruple_symmetry_defect({{1.0, 0.0}}) == doctest::Approx(2.0));
  // Kernel (phi', 0), (0, phi) of Lcal feeds the block kernel at kappa = 0.
  CHECK(block_kernel_dimension(p) >= 2);
  CHECK_THROWS_AS(p.solve(-1.0), ParameterError);
}

TEST_CASE("constant wave scan finds the band edge sqrt(2)") {
  const StabilityScan s = scan_kappa(constant_wave(64), 0.05, 3.0, 60, Sector::full);
  CHECK(s.unstable);
  CHECK(s.verdict() == "transversally unstable");
  REQUIRE(s.band_edges.size() == 1);
  CHECK(std::abs(s.band_edges[0] - std::sqrt(2.0)) <= 1e-4);
  CHECK(s.records.size() == 60);
  CHECK(s.kappa_values.front() == 0.05);
  CHECK(s.kappa_values.back() == 3.0);
  CHECK_THROWS_AS(scan_kappa(constant_wave(64), 1.0, 0.5, 10, Sector::full), ParameterError);
  CHECK_THROWS_AS(scan_kappa(constant_wave(64), 0.0, 1.0, 1, Sector::full), ParameterError);
}

TEST_CASE("even wave: instability below K, stability above") {
  const WaveProfile w = testing_support::even_wave();
  const HypothesisReport h = verify_hypotheses(w, Sector::full);
  CHECK(h.h0.passed);
  CHECK(h.h1.passed);
  CHECK(h.h2.passed);
  CHECK(h.h3.passed);
  CHECK(h.h4.passed);
  CHECK(h.overall());
  CHECK(h.n_negative_S0 == 1);
  CHECK(h.K > std::sqrt(h.lambda0));
  CHECK(h.beta > 0.0);

  const StabilityScan s = scan_kappa(w, 0.05, 3.0, 30, Sector::full);
  CHECK(s.unstable);
  const StabilityScan above = scan_kappa(w, h.K, h.K + 3.0, 20, Sector::full);
  for (const auto& r : above.records) CHECK(r.max_real_part <= 1e-8);
  CHECK_FALSE(above.unstable);
  CHECK(above.verdict() == "no transverse instability detected");
}

TEST_CASE("odd wave hypotheses hold on the odd sector only") {
  const WaveProfile w = testing_support::odd_wave();
  const HypothesisReport odd = verify_hypotheses(w, Sector::odd);
  INFO(odd.h4.details);
  CHECK(odd.overall());
  CHECK(odd.n_negative_S0 == 1);
  const HypothesisReport full = verify_hypotheses(w, Sector::full);
  CHECK_FALSE(full.h4.passed);
  CHECK(scan_kappa(w, 0.05, 3.0, 20, Sector::odd).unstable);
}

TEST_CASE("constant wave fails H4 with three negative directions") {
  const HypothesisReport h = verify_hypotheses(constant_wave(64), Sector::full);
  CHECK_FALSE(h.h4.passed);
  CHECK(h.n_negative_S0 == 3);
  CHECK_FALSE(h.overall());
}

TEST_CASE("scan output does not depend on the worker count") {
  const WaveProfile w = testing_support::even_wave(2.0, 64);
  const std::string a = scan_csv(scan_kappa(w, 0.05, 3.0, 24, Sector::full, 1));
  const std::string b = scan_csv(scan_kappa(w, 0.05, 3.0, 24, Sector::full, 4));
  const std::string c = scan_csv(scan_kappa(w, 0.05, 3.0, 24, Sector::full, 4));
  CHECK(a == b);
  CHECK(b == c);
}
