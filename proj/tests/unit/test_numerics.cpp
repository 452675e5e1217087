#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qgp/error.hpp"
#include "qgp/models.hpp"
#include "qgp/numerics.hpp"

using namespace qgp;

namespace {

double column_residual(const ComplexMatrix& h, const EigenSystem& es, std::size_t k) {
  const StateVector v = es.vector(k);
  return distance(h * v, Complex(es.values[k]) * v);
}

}  // namespace

TEST_CASE("eigh of sigma_z is ascending with swapped basis vectors") {
  const EigenSystem es = hermitian_eigh(pauli::z());
  CHECK(es.values[0] == doctest::Approx(-1.0));
  CHECK(es.values[1] == doctest::Approx(1.0));
  CHECK(std::abs(es.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(es.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eigh of eta sigma_z with xi = 0") {
  const EigenSystem es = hermitian_eigh(Complex(2.0) * pauli::z());
  CHECK(es.values[0] == doctest::Approx(-2.0));
  CHECK(es.values[1] == doctest::Approx(2.0));
}

TEST_CASE("rotating field spectrum is +-sqrt(eta^2 + xi^2) at random times") {
  const oracle::Rotating r{1.3, 0.7, 2.0};
  const auto model = rotating_field({r.eta, r.xi, r.K});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const EigenSystem es = hermitian_eigh(model->h_at(u(rng)));
    CHECK(std::abs(es.values[0] + r.E()) < 1e-12);
    CHECK(std::abs(es.values[1] - r.E()) < 1e-12);
  }
}

TEST_CASE("eigh residual and orthonormality on random Hermitian matrices") {
  std::mt19937_64 rng(2024);
  double worst_res = 0.0, worst_orth = 0.0;
  bool sorted = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
    const ComplexMatrix h = oracle::random_hermitian(rng, n);
    const EigenSystem es = hermitian_eigh(h);
    const double scale = h.frobenius_norm();
    for (std::size_t k = 0; k < n; ++k) {
      worst_res = std::max(worst_res, column_residual(h, es, k) / scale);
      if (k + 1 < n && es.values[k] > es.values[k + 1]) sorted = false;
      for (std::size_t j = 0; j < n; ++j) {
        const Complex ip = inner(es.vector(j), es.vector(k));
        worst_orth = std::max(worst_orth, std::abs(ip - Complex(j == k ? 1.0 : 0.0)));
      }
    }
  }
  CHECK(sorted);
  CHECK(worst_res < 1e-10);
  CHECK(worst_orth < 1e-10);
}

TEST_CASE("eigh rejects non-Hermitian and degenerate input") {
  const ComplexMatrix bad = pauli::x() + Complex(0.0, 1.0) * pauli::y();
  CHECK_THROWS_AS(hermitian_eigh(bad), NonHermitianError);
  CHECK_THROWS_AS(hermitian_eigh(ComplexMatrix::identity(2)), DegenerateSpectrumError);
  const std::vector<double> d{1.0, 1.0, 2.0};
  CHECK_THROWS_AS(hermitian_eigh(ComplexMatrix::diagonal(d)), DegenerateSpectrumError);
  EighOptions lax;
  lax.check_degeneracy = false;
  CHECK_NOTHROW(hermitian_eigh(ComplexMatrix::identity(3), lax));
}

TEST_CASE("unitary_step matches the eigen decomposition for N = 3") {
  std::mt19937_64 rng(5);
  const ComplexMatrix h = oracle::random_hermitian(rng, 3);
  const ComplexMatrix u = unitary_step(h, 0.37);
  const EigenSystem es = hermitian_eigh(h);
  for (std::size_t k = 0; k < 3; ++k) {
    const StateVector v = es.vector(k);
    CHECK(distance(u * v, std::polar(1.0, -0.37 * es.values[k]) * v) < 1e-12);
  }
}

TEST_CASE("propagation under H = 0 leaves the state alone") {
  const StateVector psi0 = StateVector{1.0, Complex(0.0, 1.0)}.normalized();
  const auto res = propagate([](double) { return ComplexMatrix(2); }, psi0,
                             TimeGrid::uniform(0.0, 5.0, 11));
  for (const auto& s : res.states) CHECK(distance(s, psi0) < 1e-14);
}

TEST_CASE("eigenstate of eta sigma_z only picks up a phase") {
  const double eta = 1.7;
  const auto res = propagate([&](double) { return Complex(eta) * pauli::z(); },
                             StateVector::basis(2, 0), TimeGrid::uniform(0.0, 3.0, 31));
  for (std::size_t i = 0; i < res.states.size(); ++i) {
    const double t = 0.1 * static_cast<double>(i);
    CHECK(std::abs(res.states[i][0] - std::polar(1.0, -eta * t)) < 1e-9);
    CHECK(std::abs(res.states[i][1]) < 1e-12);
  }
}

TEST_CASE("norm drift stays below 1e-9 over a million steps") {
  const auto model = rotating_field({1.0, 0.6, 1.5});
  const auto states = propagate_fixed(model->h_at, StateVector::basis(2, 0),
                                      TimeGrid::uniform(0.0, 100.0, 1001), 1000);
  double drift = 0.0;
  for (const auto& s : states) drift = std::max(drift, std::abs(s.norm() - 1.0));
  CHECK(drift < 1e-9);
}

TEST_CASE("midpoint exponential is second order under step halving") {
  const auto model = rotating_field({1.0, 0.6, 1.5});
  const TimeGrid grid = TimeGrid::uniform(0.0, 4.0, 2);
  const StateVector psi0 = StateVector::basis(2, 0);
  const StateVector ref = propagate_fixed(model->h_at, psi0, grid, 1 << 16).back();
  const double e1 = distance(propagate_fixed(model->h_at, psi0, grid, 200).back(), ref);
  const double e2 = distance(propagate_fixed(model->h_at, psi0, grid, 400).back(), ref);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("adaptive propagation honours its own error estimate") {
  const auto model = rotating_field({1.0, 0.6, 1.5});
  const TimeGrid grid = TimeGrid::uniform(0.0, 6.0, 61);
  const StateVector psi0 = StateVector::basis(2, 0);
  PropagationOptions opts;
  opts.tolerance = 1e-8;
  const auto res = propagate(model->h_at, psi0, grid, opts);
  const StateVector ref = propagate_fixed(model->h_at, psi0, grid, 4000).back();
  CHECK(res.error_estimate > 0.0);
  CHECK(distance(res.states.back(), ref) < 4.0 * res.error_estimate);
  for (const auto& s : res.states) CHECK(std::abs(s.norm() - 1.0) < 1e-9);
}

TEST_CASE("step-size underflow reports the last good time") {
  auto h = [](double t) {
    return Complex(1e4) * (Complex(std::cos(1e4 * t)) * pauli::x() + pauli::z());
  };
  PropagationOptions opts;
  opts.min_relative_step = 1e-4;
  try {
    propagate(h, StateVector::basis(2, 0), TimeGrid::uniform(0.0, 1.0, 3), opts);
    FAIL("expected PropagationError");
  } catch (const PropagationError& e) {
    CHECK(e.last_good_time() >= 0.0);
    CHECK(e.last_good_time() < 1.0);
  }
}

TEST_CASE("propagate rejects an unnormalized initial state") {
  CHECK_THROWS_AS(propagate([](double) { return pauli::z(); }, StateVector{1.0, 1.0},
                            TimeGrid::uniform(0.0, 1.0, 2)),
                  NumericalError);
}

TEST_CASE("integrate: constants, sine and the interference integrand") {
  const TimeGrid g = TimeGrid::uniform(0.0, 2.0, 11);
  const std::vector<double> ones(11, 1.0);
  CHECK(integrate(ones, g) == doctest::Approx(2.0).epsilon(1e-14));

  const TimeGrid s = TimeGrid::uniform(0.0, kPi, 1001);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = std::sin(s[i]);
  CHECK(std::abs(integrate(v, s) - 2.0) < 1e-6);

  const oracle::Rotating r{1.0, 0.3, 2.0};
  const TimeGrid t = TimeGrid::uniform(0.0, 3.0, 101);
  const std::vector<double> rate(t.size(), r.interference_rate());
  CHECK(integrate(rate, t) == doctest::Approx(r.interference_rate() * 3.0).epsilon(1e-13));
}

TEST_CASE("integrate rejects mismatched lengths") {
  const std::vector<double> v(5, 1.0);
  CHECK_THROWS_AS(integrate(v, TimeGrid::uniform(0.0, 1.0, 6)), NumericalError);
}

TEST_CASE("Simpson error drops by 16 under halving, trapezoid by 4") {
  auto simpson_error = [](std::size_t n) {
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, n + 1);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(g[i]);
    return std::abs(integrate(v, g) - (std::exp(1.0) - 1.0));
  };
  CHECK(simpson_error(16) / simpson_error(32) == doctest::Approx(16.0).epsilon(0.05));

  auto trapezoid_error = [](std::size_t n) {
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(n);
      t[i] = x * x;  // non-uniform
    }
    const TimeGrid g(t);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(g[i]);
    return std::abs(integrate(v, g) - (std::exp(1.0) - 1.0));
  };
  CHECK(trapezoid_error(64) / trapezoid_error(128) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("cumulative integral agrees with integrate on every prefix") {
  const TimeGrid g = TimeGrid::uniform(0.0, 2.0, 40);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::cos(3.0 * g[i]) + g[i];
  const auto c = cumulative_integral(v, g);
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(std::abs(c[i] - integrate(std::span<const double>(v).first(i + 1), g.prefix(i + 1))) <
          1e-10);
}

TEST_CASE("unwrap_phase examples") {
  const std::vector<double> a{0.0, 0.1, 0.2};
  const auto ua = unwrap_phase(a);
  CHECK(ua[1] == doctest::Approx(0.1));
  CHECK(ua[2] == doctest::Approx(0.2));

  const std::vector<double> b{3.0, -3.0};
  const auto ub = unwrap_phase(b);
  CHECK(ub[0] == 3.0);
  CHECK(ub[1] == doctest::Approx(-3.0 + kTwoPi));

  const TimeGrid g = TimeGrid::uniform(0.0, 2.0, 401);
  std::vector<double> args(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) args[i] = std::arg(std::polar(1.0, 5.0 * g[i]));
  const auto u = unwrap_phase(args);
  for (std::size_t i = 1; i < u.size(); ++i) {
    const double d = u[i] - u[i - 1];
    CHECK((d > -kPi && d <= kPi));
    CHECK(std::abs(std::remainder(u[i] - args[i], kTwoPi)) < 1e-12);
  }
  for (double slope : differentiate(u, g)) CHECK(slope == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("derivative stencil is fourth order on uniform grids") {
  auto err = [](std::size_t n) {
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(2.0 * g[i]);
    const auto d = differentiate(v, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(d[i] - 2.0 * std::cos(2.0 * g[i])));
    return worst;
  };
  CHECK(err(41) / err(81) > 12.0);
}

TEST_CASE("time grids validate their samples") {
  CHECK_THROWS_AS(TimeGrid(std::vector<double>{0.0}), NumericalError);
  CHECK_THROWS_AS(TimeGrid(std::vector<double>{0.0, 1.0, 1.0}), NumericalError);
  CHECK(TimeGrid::uniform(0.0, 1.0, 11).is_uniform());
  CHECK_FALSE(TimeGrid(std::vector<double>{0.0, 0.1, 0.5}).is_uniform());
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 11);
  CHECK(g.index_of(0.3) == 3);
  CHECK_THROWS_AS(g.index_of(0.35), NumericalError);
  CHECK_THROWS_AS(g.index_of(1.5), NumericalError);
}
