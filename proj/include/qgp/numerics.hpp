#pragma once

// Small dense complex linear algebra, Hermitian eigensolver, unitary time
// propagation, quadrature and phase unwrapping. Units: hbar = 1 throughout,
// so energies and angular frequencies share units.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace qgp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : amps_(dim, Complex{0.0, 0.0}) {}
  StateVector(std::initializer_list<Complex> amps) : amps_(amps) {}
  explicit StateVector(std::vector<Complex> amps) : amps_(std::move(amps)) {}

  static StateVector basis(std::size_t dim, std::size_t k);

  std::size_t dim() const noexcept { return amps_.size(); }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }

  double norm() const;
  StateVector normalized() const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(Complex factor);

 private:
  std::vector<Complex> amps_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(Complex factor, StateVector v);

/// <a|b>, antilinear in the first argument.
Complex inner(const StateVector& a, const StateVector& b);

/// Euclidean distance ||a - b||.
double distance(const StateVector& a, const StateVector& b);

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim)
      : dim_(dim), entries_(dim * dim, Complex{0.0, 0.0}) {}
  /// Row-major initializer; the entry count must be a perfect square.
  ComplexMatrix(std::initializer_list<Complex> row_major);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * dim_ + c];
  }

  ComplexMatrix adjoint() const;
  StateVector column(std::size_t c) const;
  void set_column(std::size_t c, const StateVector& v);

  double max_abs() const;
  double frobenius_norm() const;
  /// max |H - H^dagger| over entries.
  double hermiticity_deviation() const;
  bool is_hermitian(double relative_tolerance = 1e-12) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex factor);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex factor, ComplexMatrix m);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
StateVector operator*(const ComplexMatrix& m, const StateVector& v);

/// <a|M|b>
Complex matrix_element(const StateVector& a, const ComplexMatrix& m, const StateVector& b);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

// ---------------------------------------------------------------------------
// Hermitian eigenproblem

struct EighOptions {
  /// Relative to the Frobenius norm of H.
  double degeneracy_tolerance = 1e-9;
  bool check_degeneracy = true;
  /// Relative to max |H_ij|.
  double hermitian_tolerance = 1e-12;
};

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k pairs with values[k]
  StateVector vector(std::size_t k) const { return vectors.column(k); }
};

/// Closed form for N = 2, cyclic Jacobi for N > 2. Throws NonHermitianError or
/// DegenerateSpectrumError.
EigenSystem hermitian_eigh(const ComplexMatrix& h, const EighOptions& options = {});

/// exp(-i H dt) for Hermitian H.
ComplexMatrix unitary_step(const ComplexMatrix& h, double dt);

// ---------------------------------------------------------------------------
// Time grids

class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> samples);
  static TimeGrid uniform(double t0, double t1, std::size_t count);

  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  double front() const { return samples_.front(); }
  double back() const { return samples_.back(); }
  double span() const { return samples_.back() - samples_.front(); }
  bool is_uniform() const noexcept { return uniform_; }
  /// Uniform spacing; mean spacing on non-uniform grids.
  double step() const { return span() / static_cast<double>(samples_.size() - 1); }
  std::span<const double> samples() const noexcept { return samples_; }

  /// Index of the sample equal to t within 1e-9 of the local spacing.
  /// Throws NumericalError when t is not a grid time.
  std::size_t index_of(double t) const;

  /// First `count` samples, as a grid of its own.
  TimeGrid prefix(std::size_t count) const;

 private:
  std::vector<double> samples_;
  bool uniform_ = false;
};

// ---------------------------------------------------------------------------
// Propagation of i d/dt psi = H(t) psi

using HamiltonianFn = std::function<ComplexMatrix(double)>;

struct PropagationOptions {
  /// Local error bound per accepted step, in state-vector norm.
  double tolerance = 1e-9;
  /// Smallest step relative to the grid span before giving up.
  double min_relative_step = 1e-14;
  std::size_t max_steps = 200'000'000;
};

struct PropagationResult {
  std::vector<StateVector> states;  // one per grid sample
  double error_estimate = 0.0;      // sum of accepted local error estimates
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Midpoint-exponential (second-order Magnus) stepping with step-doubling
/// error control. Throws PropagationError on step-size underflow.
PropagationResult propagate(const HamiltonianFn& h_of_t, const StateVector& psi0,
                            const TimeGrid& grid, const PropagationOptions& options = {});

/// Same scheme with a fixed number of equal substeps per grid interval.
std::vector<StateVector> propagate_fixed(const HamiltonianFn& h_of_t, const StateVector& psi0,
                                         const TimeGrid& grid, std::size_t substeps);

// ---------------------------------------------------------------------------
// Quadrature, differentiation, phases

/// Composite Simpson on uniform grids (3/8 rule closes an odd interval count),
/// trapezoid otherwise.
double integrate(std::span<const double> values, const TimeGrid& grid);

/// out[i] equals integrate() over samples [0, i].
std::vector<double> cumulative_integral(std::span<const double> values, const TimeGrid& grid);

struct StencilTerm {
  std::size_t index;
  double weight;
};

/// First-derivative weights at sample i: fourth order on uniform grids with
/// at least five samples (one-sided near the ends), three-point Lagrange
/// otherwise.
std::vector<StencilTerm> derivative_stencil(const TimeGrid& grid, std::size_t i);

std::vector<double> differentiate(std::span<const double> values, const TimeGrid& grid);

/// Removes 2*pi jumps; consecutive output differences lie in (-pi, pi].
std::vector<double> unwrap_phase(std::span<const double> angles);

}  // namespace qgp
