#include "transverse/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "transverse/error.hpp"

namespace transverse {

namespace {

constexpr const char* kModule = "spectral_core";
constexpr double kParityTolerance = 1e-10;

using ComplexVector = std::vector<std::complex<double>>;

int signed_index(int n, int size) { return n <= size / 2 ? n : n - size; }

ComplexVector forward(const Eigen::VectorXd& values) {
  thread_local Eigen::FFT<double> fft;
  std::vector<double> in(values.data(), values.data() + values.size());
  ComplexVector out;
  fft.fwd(out, in);
  const double scale = 1.0 / static_cast<double>(values.size());
  for (auto& c : out) c *= scale;
  return out;
}

Eigen::VectorXd inverse(ComplexVector coeffs) {
  thread_local Eigen::FFT<double> fft;
  const auto n = static_cast<double>(coeffs.size());
  for (auto& c : coeffs) c *= n;
  std::vector<double> out;
  fft.inv(out, coeffs);
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

// Parity is preserved exactly by symmetrizing, since rounding in the FFT
// would otherwise accumulate over long solver runs.
RealField with_parity(const PeriodicGrid& grid, Eigen::VectorXd values, Parity parity) {
  if (parity == Parity::none) return RealField(grid, std::move(values), parity);
  const int n = grid.size();
  Eigen::VectorXd out(n);
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  for (int j = 0; j < n; ++j) out[j] = 0.5 * (values[j] + sign * values[(n - j) % n]);
  return RealField(grid, std::move(out), parity);
}

Parity combine(Parity a, Parity b) { return a == b ? a : Parity::none; }

void require_same_grid(const RealField& a, const RealField& b) {
  if (!(a.grid() == b.grid())) throw ParameterError(kModule, "fields live on different grids");
}

}  // namespace

std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: return "none";
  }
  return "none";
}

Parity parity_from_string(std::string_view s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  if (s == "none") return Parity::none;
  throw ParameterError(kModule, "unknown parity '" + std::string(s) + "'");
}

std::string_view to_string(BasisKind k) {
  switch (k) {
    case BasisKind::cosine: return "cosine";
    case BasisKind::sine: return "sine";
    case BasisKind::full_fourier: return "full_fourier";
  }
  return "full_fourier";
}

PeriodicGrid::PeriodicGrid(double period, int modes) : period_(period), modes_(modes) {
  if (!(period > 0.0) || !std::isfinite(period))
    throw ParameterError(kModule, "period L must be positive");
  if (modes < 8 || modes % 2 != 0)
    throw ParameterError(kModule, "mode count N must be even and at least 8");
}

Eigen::VectorXd PeriodicGrid::nodes() const {
  Eigen::VectorXd x(modes_);
  for (int j = 0; j < modes_; ++j) x[j] = node(j);
  return x;
}

double PeriodicGrid::wavenumber(int n) const noexcept {
  return 2.0 * std::numbers::pi * n / period_;
}

PeriodicGrid build_grid(double period, int modes) { return PeriodicGrid(period, modes); }

double parity_defect(const Eigen::VectorXd& values, Parity parity) {
  if (parity == Parity::none) return 0.0;
  const auto n = static_cast<int>(values.size());
  const double sign = parity == Parity::even ? -1.0 : 1.0;
  double defect = 0.0;
  for (int j = 0; j < n; ++j)
    defect = std::max(defect, std::abs(values[j] + sign * values[(n - j) % n]));
  return defect;
}

RealField::RealField(PeriodicGrid grid, Eigen::VectorXd values, Parity parity)
    : grid_(grid), values_(std::move(values)), parity_(parity) {
  if (values_.size() != grid_.size())
    throw ParameterError(kModule, "field has " + std::to_string(values_.size()) +
                                      " samples but grid has " + std::to_string(grid_.size()));
  if (!values_.allFinite()) throw ParameterError(kModule, "field contains non-finite samples");
  const double tol = kParityTolerance * max_abs();
  if (parity_defect(values_, parity_) > tol) {
    throw ParameterError(kModule, "samples are not " + std::string(to_string(parity_)) +
                                      " within tolerance");
  }
  if (parity_ == Parity::odd && std::abs(values_[0]) > tol)
    throw ParameterError(kModule, "odd field must vanish at x = 0");
}

RealField RealField::from_function(const PeriodicGrid& grid, const std::function<double(double)>& f,
                                   Parity parity) {
  Eigen::VectorXd v(grid.size());
  for (int j = 0; j < grid.size(); ++j) v[j] = f(grid.node(j));
  return with_parity(grid, std::move(v), parity);
}

RealField RealField::zeros(const PeriodicGrid& grid, Parity parity) {
  return RealField(grid, Eigen::VectorXd::Zero(grid.size()), parity);
}

double RealField::max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

std::vector<std::complex<double>> fourier_coefficients(const RealField& field) {
  return forward(field.values());
}

RealField derivative(const RealField& field, int order) {
  if (order < 0) throw ParameterError(kModule, "derivative order must be nonnegative");
  if (order == 0) return field;
  const auto& grid = field.grid();
  const int n = grid.size();
  auto c = forward(field.values());
  const std::complex<double> i(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    const int m = signed_index(k, n);
    if (order % 2 == 1 && k == n / 2) {
      c[k] = 0.0;
      continue;
    }
    c[k] *= std::pow(i * grid.wavenumber(m), order);
  }
  Parity p = field.parity();
  if (order % 2 == 1 && p != Parity::none) p = p == Parity::even ? Parity::odd : Parity::even;
  return with_parity(grid, inverse(std::move(c)), p);
}

RealField second_derivative(const RealField& field) { return derivative(field, 2); }

double integrate(const RealField& field) { return field.values().sum() * field.grid().spacing(); }

double inner_product(const RealField& a, const RealField& b) {
  require_same_grid(a, b);
  return a.values().dot(b.values()) * a.grid().spacing();
}

double l2_norm(const RealField& field) { return std::sqrt(inner_product(field, field)); }

RealField project_parity(const RealField& field, Parity parity) {
  if (parity == Parity::none) return field;
  return with_parity(field.grid(), field.values(), parity);
}

RealField resample(const RealField& field, int new_modes) {
  const PeriodicGrid target(field.grid().period(), new_modes);
  const int n = field.size();
  if (new_modes == n) return field;
  const auto c = forward(field.values());
  ComplexVector out(new_modes, 0.0);
  const int keep = std::min(n, new_modes) / 2;
  for (int k = 0; k < keep; ++k) {
    out[k] = c[k];
    if (k > 0) out[new_modes - k] = c[n - k];
  }
  // The Nyquist coefficient of the smaller grid is shared by +-keep.
  if (new_modes > n) {
    out[keep] = 0.5 * c[keep];
    out[new_modes - keep] = 0.5 * c[keep];
  } else {
    out[keep] = c[keep] + c[n - keep];
  }
  return with_parity(target, inverse(std::move(out)), field.parity());
}

RealField solve_helmholtz(const RealField& rhs, double shift) {
  if (!(shift > 0.0)) throw ParameterError(kModule, "Helmholtz shift must be positive");
  const auto& grid = rhs.grid();
  const int n = grid.size();
  auto c = forward(rhs.values());
  for (int k = 0; k < n; ++k) {
    const double xi = grid.wavenumber(signed_index(k, n));
    c[k] /= xi * xi + shift;
  }
  return with_parity(grid, inverse(std::move(c)), rhs.parity());
}

RealField power_nonlinearity(const RealField& u, double alpha) {
  Eigen::VectorXd v = u.values().unaryExpr([alpha](double x) {
    return x == 0.0 ? 0.0 : std::pow(std::abs(x), alpha) * x;
  });
  return RealField(u.grid(), std::move(v), u.parity());
}

RealField abs_power(const RealField& u, double alpha) {
  Eigen::VectorXd v = u.values().unaryExpr([alpha](double x) {
    return x == 0.0 ? 0.0 : std::pow(std::abs(x), alpha);
  });
  // |u|^alpha is even whenever u has a definite parity.
  const Parity p = u.parity() == Parity::none ? Parity::none : Parity::even;
  return with_parity(u.grid(), std::move(v), p);
}

RealField operator+(const RealField& a, const RealField& b) {
  require_same_grid(a, b);
  return RealField(a.grid(), a.values() + b.values(), combine(a.parity(), b.parity()));
}

RealField operator-(const RealField& a, const RealField& b) {
  require_same_grid(a, b);
  return RealField(a.grid(), a.values() - b.values(), combine(a.parity(), b.parity()));
}

RealField operator*(double s, const RealField& a) {
  return RealField(a.grid(), s * a.values(), a.parity());
}

ParityBasis::ParityBasis(BasisKind kind, PeriodicGrid grid) : kind_(kind), grid_(grid) {
  const int n = grid_.size();
  if (kind_ != BasisKind::sine) {
    for (int m = 0; m <= n / 2; ++m) {
      indices_.push_back(m);
      sine_.push_back(false);
    }
  }
  if (kind_ != BasisKind::cosine) {
    for (int m = 1; m < n / 2; ++m) {
      indices_.push_back(m);
      sine_.push_back(true);
    }
  }
  const double length = grid_.period();
  synthesis_.resize(n, dimension());
  const double root_weight = std::sqrt(length / n);
  for (int k = 0; k < dimension(); ++k) {
    const int m = indices_[k];
    const bool edge = m == 0 || m == n / 2;
    const double amp = (edge ? std::sqrt(1.0 / length) : std::sqrt(2.0 / length)) * root_weight;
    const double xi = grid_.wavenumber(m);
    for (int j = 0; j < n; ++j) {
      // Exact sample values at the Nyquist and zero modes avoid cos/sin
      // rounding in those columns.
      const double x = grid_.node(j);
      double e;
      if (sine_[k]) {
        e = std::sin(xi * x);
      } else if (m == 0) {
        e = 1.0;
      } else if (m == n / 2) {
        e = j % 2 == 0 ? 1.0 : -1.0;
      } else {
        e = std::cos(xi * x);
      }
      synthesis_(j, k) = amp * e;
    }
  }
}

Parity ParityBasis::parity() const noexcept {
  switch (kind_) {
    case BasisKind::cosine: return Parity::even;
    case BasisKind::sine: return Parity::odd;
    case BasisKind::full_fourier: return Parity::none;
  }
  return Parity::none;
}

Eigen::VectorXd ParityBasis::coefficients(const RealField& field) const {
  if (!(field.grid() == grid_)) throw BasisError(kModule, "field and basis grids differ");
  const double root_weight = std::sqrt(grid_.period() / grid_.size());
  return root_weight * (synthesis_.transpose() * field.values());
}

RealField ParityBasis::field(const Eigen::VectorXd& coefficients) const {
  if (coefficients.size() != dimension())
    throw BasisError(kModule, "coefficient vector does not match basis dimension");
  const double inv_root_weight = std::sqrt(grid_.size() / grid_.period());
  return with_parity(grid_, inv_root_weight * (synthesis_ * coefficients), parity());
}

Eigen::MatrixXd ParityBasis::hill_matrix(const RealField& potential) const {
  if (!(potential.grid() == grid_)) throw BasisError(kModule, "potential and basis grids differ");
  Eigen::MatrixXd m = synthesis_.transpose() * potential.values().asDiagonal() * synthesis_;
  for (int k = 0; k < dimension(); ++k) {
    const double xi = frequency(k);
    m(k, k) += xi * xi;
  }
  // Symmetric up to rounding; make it exact.
  return 0.5 * (m + m.transpose());
}

}  // namespace transverse
