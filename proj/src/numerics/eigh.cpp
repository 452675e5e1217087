#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/numerics.hpp"

namespace qgp {
namespace {

void require_hermitian(const ComplexMatrix& h, double relative_tolerance) {
  const double dev = h.hermiticity_deviation();
  if (dev > relative_tolerance * h.max_abs()) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: max |H - H^dagger| = " << dev << " (scale "
        << h.max_abs() << ")";
    throw NonHermitianError(msg.str(), dev);
  }
}

// H = mean + r n.sigma. Columns come out as (sin(t/2), -e^{ip} cos(t/2)) and
// (cos(t/2), e^{ip} sin(t/2)) for the lower and upper level.
EigenSystem eigh_2x2(const ComplexMatrix& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const Complex b = h(0, 1);
  const double mean = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  const double babs = std::abs(b);
  const double r = std::hypot(half, babs);

  EigenSystem out;
  out.values = {mean - r, mean + r};
  out.vectors = ComplexMatrix(2);

  double c = 1.0;  // cos(theta/2)
  double s = 0.0;  // sin(theta/2)
  if (r > 0.0) {
    if (half >= 0.0) {
      c = std::sqrt((r + half) / (2.0 * r));
      s = babs / (2.0 * r * c);
    } else {
      s = std::sqrt((r - half) / (2.0 * r));
      c = babs / (2.0 * r * s);
    }
  }
  const Complex phase = babs > 0.0 ? std::conj(b) / babs : Complex{1.0, 0.0};
  out.vectors(0, 0) = s;
  out.vectors(1, 0) = -phase * c;
  out.vectors(0, 1) = c;
  out.vectors(1, 1) = phase * s;
  return out;
}

EigenSystem eigh_jacobi(const ComplexMatrix& h) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h;
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = h.frobenius_norm();

  auto off_norm = [&] {
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (p != q) sum += std::norm(a(p, q));
    return std::sqrt(sum);
  };

  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-300 || g <= 1e-18 * scale) continue;
        const Complex rot = std::conj(apq) / g;  // e^{-i arg a_pq}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex gpp = c, gpq = s, gqp = -s * rot, gqq = c * rot;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }
  if (off_norm() > 1e-12 * scale) throw NumericalError("Jacobi eigensolver did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    out.vectors.set_column(k, v.column(order[k]));
  }
  return out;
}

}  // namespace

EigenSystem hermitian_eigh(const ComplexMatrix& h, const EighOptions& options) {
  if (h.dim() < 1) throw NumericalError("eigensolver needs a non-empty matrix");
  require_hermitian(h, options.hermitian_tolerance);
  EigenSystem out = h.dim() == 2 ? eigh_2x2(h) : eigh_jacobi(h);
  if (options.check_degeneracy) {
    const double floor = options.degeneracy_tolerance * h.frobenius_norm();
    for (std::size_t k = 0; k + 1 < out.values.size(); ++k) {
      const double gap = out.values[k + 1] - out.values[k];
      if (gap <= floor) {
        std::ostringstream msg;
        msg << "near-degenerate levels " << k << " and " << k + 1 << ": gap " << gap
            << " <= tolerance " << floor;
        throw DegenerateSpectrumError(msg.str(), k, gap);
      }
    }
  }
  return out;
}

ComplexMatrix unitary_step(const ComplexMatrix& h, double dt) {
  if (h.dim() == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double r = std::hypot(half, std::abs(h(0, 1)));
    const double angle = r * dt;
    const double sin_over_r = r > 0.0 ? std::sin(angle) / r : dt;
    const Complex global = std::polar(1.0, -mean * dt);
    const Complex minus_i{0.0, -1.0};
    ComplexMatrix u(2);
    u(0, 0) = global * (std::cos(angle) + minus_i * sin_over_r * half);
    u(1, 1) = global * (std::cos(angle) - minus_i * sin_over_r * half);
    u(0, 1) = global * minus_i * sin_over_r * h(0, 1);
    u(1, 0) = global * minus_i * sin_over_r * h(1, 0);
    return u;
  }
  EighOptions opts;
  opts.check_degeneracy = false;
  const EigenSystem es = hermitian_eigh(h, opts);
  const std::size_t n = h.dim();
  ComplexMatrix u(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex ph = std::polar(1.0, -es.values[k] * dt);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        u(r, c) += es.vectors(r, k) * ph * std::conj(es.vectors(c, k));
  }
  return u;
}

}  // namespace qgp
