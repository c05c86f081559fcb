#pragma once

// Periodic Fourier discretization on the L-torus: equispaced grids, real
// sampled fields with a declared parity, spectral differentiation,
// quadrature and the parity-adapted real Fourier bases used for operator
// assembly.

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace transverse {

enum class Parity { even, odd, none };

std::string_view to_string(Parity p);
Parity parity_from_string(std::string_view s);

class PeriodicGrid {
public:
  PeriodicGrid(double period, int modes);

  double period() const noexcept { return period_; }
  int size() const noexcept { return modes_; }
  double spacing() const noexcept { return period_ / modes_; }
  double node(int j) const noexcept { return j * spacing(); }
  Eigen::VectorXd nodes() const;

  // Angular wavenumber 2*pi*n/L of Fourier index n (signed).
  double wavenumber(int n) const noexcept;

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) noexcept {
    return a.period_ == b.period_ && a.modes_ == b.modes_;
  }

private:
  double period_;
  int modes_;
};

PeriodicGrid build_grid(double period, int modes);

/// Real samples on a periodic grid. A declared even/odd parity is checked
/// against the samples at construction (tolerance 1e-10 * max|values|).
class RealField {
public:
  RealField(PeriodicGrid grid, Eigen::VectorXd values, Parity parity = Parity::none);

  static RealField from_function(const PeriodicGrid& grid, const std::function<double(double)>& f,
                                 Parity parity = Parity::none);
  static RealField zeros(const PeriodicGrid& grid, Parity parity = Parity::none);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Parity parity() const noexcept { return parity_; }
  int size() const noexcept { return grid_.size(); }
  double operator[](int j) const { return values_[j]; }
  double max_abs() const;

private:
  PeriodicGrid grid_;
  Eigen::VectorXd values_;
  Parity parity_;
};

// Largest violation of the requested symmetry, |f(x_j) -/+ f(-x_j)|.
double parity_defect(const Eigen::VectorXd& values, Parity parity);

// Discrete Fourier coefficients u_hat(n) = (1/N) sum_j u_j exp(-i xi_n x_j),
// indexed n = 0..N-1 in FFT order.
std::vector<std::complex<double>> fourier_coefficients(const RealField& field);

RealField derivative(const RealField& field, int order);
RealField second_derivative(const RealField& field);
double integrate(const RealField& field);
double inner_product(const RealField& a, const RealField& b);
double l2_norm(const RealField& field);
RealField project_parity(const RealField& field, Parity parity);

// Trigonometric interpolation onto a grid of the same period with
// new_modes points (zero padding or truncation, Nyquist split evenly).
RealField resample(const RealField& field, int new_modes);

// (-d^2/dx^2 + shift)^{-1} applied spectrally; shift must be positive.
RealField solve_helmholtz(const RealField& rhs, double shift);

// Pointwise |u|^alpha u and |u|^alpha; both vanish at u = 0 for alpha > 0.
RealField power_nonlinearity(const RealField& u, double alpha);
RealField abs_power(const RealField& u, double alpha);

RealField operator+(const RealField& a, const RealField& b);
RealField operator-(const RealField& a, const RealField& b);
RealField operator*(double s, const RealField& a);

enum class BasisKind { cosine, sine, full_fourier };

std::string_view to_string(BasisKind k);

/// L2-orthonormal real Fourier basis restricted to a parity sector.
///
/// cosine:       1/sqrt(L), sqrt(2/L) cos(xi_n x) for 0 < n < N/2, and the
///               Nyquist cosine 1/sqrt(L) cos(xi_{N/2} x).  N/2 + 1 functions.
/// sine:         sqrt(2/L) sin(xi_n x) for 0 < n < N/2.  N/2 - 1 functions.
/// full_fourier: the cosine functions followed by the sine functions.
///
/// Orthonormality holds exactly for the grid quadrature, so Galerkin
/// matrices assembled here are the collocation operators written in an
/// orthonormal coordinate system.
class ParityBasis {
public:
  ParityBasis(BasisKind kind, PeriodicGrid grid);

  BasisKind kind() const noexcept { return kind_; }
  const PeriodicGrid& grid() const noexcept { return grid_; }
  int dimension() const noexcept { return static_cast<int>(indices_.size()); }
  int mode_index(int k) const { return indices_[k]; }
  bool is_sine(int k) const { return sine_[k]; }
  double frequency(int k) const { return grid_.wavenumber(indices_[k]); }
  Parity parity() const noexcept;

  // N x dim matrix with columns sqrt(L/N) e_k(x_j); orthonormal columns.
  const Eigen::MatrixXd& synthesis() const noexcept { return synthesis_; }

  Eigen::VectorXd coefficients(const RealField& field) const;
  RealField field(const Eigen::VectorXd& coefficients) const;

  // Galerkin matrix of -d^2/dx^2 + potential(x) in this basis.
  Eigen::MatrixXd hill_matrix(const RealField& potential) const;

private:
  BasisKind kind_;
  PeriodicGrid grid_;
  std::vector<int> indices_;
  std::vector<bool> sine_;
  Eigen::MatrixXd synthesis_;
};

}  // namespace transverse
