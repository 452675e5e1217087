#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/numerics.hpp"

namespace qgp {

StateVector StateVector::basis(std::size_t dim, std::size_t k) {
  StateVector v(dim);
  v[k] = 1.0;
  return v;
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return std::sqrt(sum);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw NumericalError("cannot normalize the zero vector");
  StateVector out(*this);
  out *= 1.0 / n;
  return out;
}

StateVector& StateVector::operator+=(const StateVector& other) {
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= other.amps_[i];
  return *this;
}

StateVector& StateVector::operator*=(Complex factor) {
  for (auto& a : amps_) a *= factor;
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(Complex factor, StateVector v) { return v *= factor; }

Complex inner(const StateVector& a, const StateVector& b) {
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

double distance(const StateVector& a, const StateVector& b) { return (a - b).norm(); }

ComplexMatrix::ComplexMatrix(std::initializer_list<Complex> row_major) {
  const auto n = static_cast<std::size_t>(std::lround(std::sqrt(row_major.size())));
  if (n * n != row_major.size())
    throw NumericalError("matrix initializer size is not a perfect square");
  dim_ = n;
  entries_.assign(row_major.begin(), row_major.end());
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

StateVector ComplexMatrix::column(std::size_t c) const {
  StateVector v(dim_);
  for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
  return v;
}

void ComplexMatrix::set_column(std::size_t c, const StateVector& v) {
  for (std::size_t r = 0; r < dim_; ++r) (*this)(r, c) = v[r];
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += std::norm(e);
  return std::sqrt(sum);
}

double ComplexMatrix::hermiticity_deviation() const {
  double dev = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      dev = std::max(dev, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return dev;
}

bool ComplexMatrix::is_hermitian(double relative_tolerance) const {
  return hermiticity_deviation() <= relative_tolerance * max_abs();
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex factor) {
  for (auto& e : entries_) e *= factor;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex factor, ComplexMatrix m) { return m *= factor; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex ark = a(r, k);
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

StateVector operator*(const ComplexMatrix& m, const StateVector& v) {
  const std::size_t n = m.dim();
  StateVector out(n);
  for (std::size_t r = 0; r < n; ++r) {
    Complex sum{0.0, 0.0};
    for (std::size_t c = 0; c < n; ++c) sum += m(r, c) * v[c];
    out[r] = sum;
  }
  return out;
}

Complex matrix_element(const StateVector& a, const ComplexMatrix& m, const StateVector& b) {
  return inner(a, m * b);
}

namespace pauli {
ComplexMatrix x() { return ComplexMatrix{0.0, 1.0, 1.0, 0.0}; }
ComplexMatrix y() { return ComplexMatrix{0.0, Complex{0.0, -1.0}, Complex{0.0, 1.0}, 0.0}; }
ComplexMatrix z() { return ComplexMatrix{1.0, 0.0, 0.0, -1.0}; }
}  // namespace pauli

}  // namespace qgp
