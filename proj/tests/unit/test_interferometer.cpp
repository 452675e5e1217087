#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qgp/error.hpp"
#include "qgp/gauge.hpp"
#include "qgp/interferometer.hpp"

using namespace qgp;

namespace {

const RotatingFieldParams kNeutron{kTwoPi * 721e3, kTwoPi * 7.21e3, 5.0};
const RotatingFieldParams kSmall{1.0, 0.6, 1.5};

double drive_period(const RotatingFieldParams& p) { return kTwoPi / std::abs(p.rotation_rate()); }

double oscillation_period(const RotatingFieldParams& p) {
  const oracle::Rotating o{p.eta, p.xi, p.K};
  return kTwoPi / std::abs(o.interference_rate());
}

GaugeTrajectory neutron_track(double periods, std::size_t samples) {
  return track(rotating_field(kNeutron), TimeGrid::uniform(0.0, periods * drive_period(kNeutron), samples));
}

GaugeTransform random_gauge(std::mt19937_64& rng, double rate) {
  std::uniform_real_distribution<double> amp(-1.5, 1.5), freq(0.3, 2.0);
  GaugeTransform g;
  for (int k = 0; k < 2; ++k) {
    const double a = amp(rng), b = freq(rng) * rate, c = amp(rng);
    g.phases.push_back([=](double t) { return a * std::sin(b * t) + c * (1.0 - std::cos(b * t)); });
  }
  return g;
}

}  // namespace

TEST_CASE("equal-time intensity is 1 and I stays inside [0, 2]") {
  const auto traj = track(sphere_field({1.0, AngleFunction::sinusoid(kPi / 4, 0.1, 1.0),
                                        AngleFunction::linear(0.0, 1.0)}),
                          TimeGrid::uniform(0.0, 6.0, 301));
  const Interferometer ifm(traj);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(std::abs(ifm.intensity(i, i).intensity - 1.0) < 1e-12);
    for (std::size_t j = 0; j < traj.size(); j += 7) {
      const double I = ifm.intensity(i, j).intensity;
      CHECK(I >= 0.0);
      CHECK(I <= 2.0);
    }
  }
}

TEST_CASE("static model gives I = 1 everywhere") {
  const auto m = custom_model(2, [](double) { return pauli::z() + Complex(0.4) * pauli::x(); });
  const auto traj = track(m, TimeGrid::uniform(0.0, 3.0, 31));
  const Interferometer ifm(traj);
  for (std::size_t i = 0; i < traj.size(); ++i)
    for (std::size_t j = 0; j < traj.size(); ++j)
      CHECK(std::abs(ifm.intensity(i, j).intensity - 1.0) < 1e-12);
}

TEST_CASE("intensity matches the closed-form eigenvector overlap") {
  const oracle::Rotating o{kSmall.eta, kSmall.xi, kSmall.K};
  const double T = oscillation_period(kSmall);
  const auto traj = track(rotating_field(kSmall), TimeGrid::uniform(0.0, 2.0 * T, 20001), {GaugeMode::analytic});
  const Interferometer ifm(traj);
  const std::size_t i1 = 2500;
  for (std::size_t i2 = 0; i2 < traj.size(); i2 += 100) {
    const InterferogramRecord r = ifm.intensity(i1, i2);
    CHECK(std::abs(r.intensity - o.intensity(r.t1, r.t2)) < 1e-8);
    CHECK(std::abs(r.overlap - inner(o.lower(r.t1), o.upper(r.t2))) < 1e-12);
  }
  // PT gauge yields the same physical intensity.
  const Interferometer pt(track(rotating_field(kSmall), traj.grid()));
  for (std::size_t i2 = 0; i2 < traj.size(); i2 += 500)
    CHECK(std::abs(pt.intensity(i1, i2).intensity - o.intensity(traj.grid()[i1], traj.grid()[i2])) < 1e-8);
}

TEST_CASE("neutron parameters: fixed t1, t2 swept over one QGP period") {
  const double T = oscillation_period(kNeutron);
  const auto traj = track(rotating_field(kNeutron), TimeGrid::uniform(0.0, 2.0 * T, 4001));
  const oracle::Rotating o{kNeutron.eta, kNeutron.xi, kNeutron.K};
  const Interferometer ifm(traj);
  for (std::size_t i2 = 1000; i2 <= 3000; i2 += 25) {
    const InterferogramRecord r = ifm.intensity(1000, i2);
    const double envelope = std::abs(inner(o.lower(r.t1), o.upper(r.t2)));
    CHECK(std::abs(r.intensity - 1.0) <= envelope * (1.0 + 1e-9) + 1e-12);
    CHECK(std::abs(r.intensity - o.intensity(r.t1, r.t2)) < 1e-6);
  }
}

TEST_CASE("analytic differential intensity matches the closed form") {
  const oracle::Rotating o{kSmall.eta, kSmall.xi, kSmall.K};
  const auto traj = track(rotating_field(kSmall), TimeGrid::uniform(0.0, 3.0 * oscillation_period(kSmall), 20001));
  const Interferometer ifm(traj);
  const DifferentialTrace tr = ifm.trace();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.grid()[i];
    CHECK(std::abs(tr.dI_dt2[i] - o.differential(t)) < 1e-7);
    CHECK(tr.envelope[i] == doctest::Approx(o.coupling()).epsilon(1e-9));
    CHECK(std::abs(tr.phase_arg[i] - o.interference_rate() * t) < 1e-8 * (1.0 + std::abs(o.interference_rate() * t)));
    CHECK(std::abs(tr.dI_dt2[i]) <= tr.envelope[i] * (1.0 + 1e-12));
  }
  CHECK(std::abs(tr.dI_dt2.front()) < 1e-10);
  CHECK(tr.qgp_phase.back() == doctest::Approx(o.delta() * traj.grid().back()).epsilon(1e-8));
}

TEST_CASE("finite difference agrees with the analytic law at 1000 random t1") {
  const double T = oscillation_period(kNeutron);
  const auto traj = track(rotating_field(kNeutron), TimeGrid::uniform(0.0, 5.0 * T, 5001));
  const Interferometer ifm(traj);
  const double envelope = std::abs(ifm.qgp().overlap.front());
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, traj.size() - 1);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t i = pick(rng);
    const double a = ifm.differential(i, DifferentialMode::analytic);
    const double f = ifm.differential(i, DifferentialMode::finite_difference, 1e-4 * T);
    worst = std::max(worst, std::abs(f - a) / envelope);
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("first-order remainder scales quadratically") {
  const double T = oscillation_period(kNeutron);
  const auto traj = track(rotating_field(kNeutron), TimeGrid::uniform(0.0, 2.0 * T, 2001));
  const Interferometer ifm(traj);
  for (std::size_t i : {137u, 600u, 1333u}) {
    const double a = ifm.differential(i, DifferentialMode::analytic);
    std::vector<double> remainder;
    for (double f : {1e-3, 5e-4, 2.5e-4}) {
      const double dt = f * T;
      remainder.push_back(std::abs(2.0 * dt * ifm.finite_difference(i, dt) - 2.0 * a * dt));
    }
    const double p1 = std::log2(remainder[0] / remainder[1]);
    const double p2 = std::log2(remainder[1] / remainder[2]);
    CHECK(p1 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(p2 == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("intensity and differential are gauge invariant") {
  const auto traj = track(rotating_field(kSmall), TimeGrid::uniform(0.0, 10.0, 4001));
  const Interferometer base(traj);
  const DifferentialTrace ref = base.trace();
  std::mt19937_64 rng(11);
  double worst_i = 0.0, worst_d = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Interferometer moved(apply_gauge(traj, random_gauge(rng, 1.0)));
    const DifferentialTrace tr = moved.trace();
    for (std::size_t i = 0; i < traj.size(); i += 17) {
      worst_d = std::max(worst_d, std::abs(tr.dI_dt2[i] - ref.dI_dt2[i]));
      for (std::size_t j = 0; j < traj.size(); j += 401)
        worst_i = std::max(worst_i, std::abs(moved.intensity(i, j).intensity - base.intensity(i, j).intensity));
    }
  }
  CHECK(worst_i < 1e-8);
  CHECK(worst_d < 1e-8 * ref.envelope.front());
}

TEST_CASE("free functions and validity errors") {
  const auto traj = track(rotating_field(kSmall), TimeGrid::uniform(0.0, 2.0, 201));
  CHECK(intensity(traj, 0.5, 0.5).intensity == doctest::Approx(1.0));
  const Interferometer ifm(traj);
  CHECK(differential_intensity(traj, 1.0, DifferentialMode::analytic) ==
        doctest::Approx(ifm.differential(100, DifferentialMode::analytic)));
  CHECK_THROWS_AS(intensity(traj, 0.5, 2.5), NumericalError);
  CHECK_THROWS_AS(ifm.finite_difference(3, 0.0), NumericalError);

  const SphereFieldParams nod{1.0, AngleFunction::sinusoid(kPi / 4, 0.3, 1.0), AngleFunction::constant(0.2)};
  const Interferometer bad(track(sphere_field(nod), TimeGrid::uniform(0.0, kPi, 101)));
  CHECK_THROWS_WITH_AS(bad.differential(50, DifferentialMode::analytic), doctest::Contains("undefined"),
                       NumericalError);
}

TEST_CASE("swapping the arms mirrors the QGP") {
  const auto traj = track(rotating_field(kSmall), TimeGrid::uniform(0.0, 4.0, 801));
  const Interferometer a(traj), b(traj, ArmAssignment{}.swapped());
  CHECK(b.arms().first == 1);
  const oracle::Rotating o{kSmall.eta, kSmall.xi, kSmall.K};
  CHECK(a.qgp().delta[10] == doctest::Approx(o.delta()).epsilon(1e-8));
  CHECK(b.qgp().delta[10] == doctest::Approx(-o.delta()).epsilon(1e-8));
  for (std::size_t i : {0u, 100u, 433u})
    for (std::size_t j : {50u, 300u, 800u})
      CHECK(b.intensity(i, j).intensity == doctest::Approx(a.intensity(j, i).intensity).epsilon(1e-13));
  const double pa = a.trace().phase_arg.back(), pb = b.trace().phase_arg.back();
  CHECK(pa == doctest::Approx(-pb).epsilon(1e-8));
}

TEST_CASE("neutron preset: 5.77 MHz, about four times the gap") {
  const FrequencyScan scan = scan_and_extract_frequency(neutron_track(20.0, 4001));
  const double gap_hz = 2.0 * std::hypot(721e3, 7.21e3);
  CHECK_FALSE(scan.below_resolution);
  CHECK(scan.dominant_frequency == doctest::Approx(5.77e6).epsilon(1e-2));
  CHECK(scan.dominant_frequency / gap_hz > 3.9);
  CHECK(scan.dominant_frequency / gap_hz < 4.1);
  CHECK(scan.dominant_frequency == doctest::Approx(scan.phase_rate_frequency).epsilon(1e-4));
}

TEST_CASE("QGP cancelling the gap leaves no resolvable oscillation") {
  const double eta = kNeutron.eta, xi = kNeutron.xi;
  const RotatingFieldParams p{eta, xi, (eta * eta + xi * xi) / (eta * eta)};
  const double span = 20.0 * drive_period(p);
  const FrequencyScan scan = scan_and_extract_frequency(track(rotating_field(p), TimeGrid::uniform(0.0, span, 4001)));
  CHECK(scan.below_resolution);
  CHECK(scan.dominant_frequency < 1.0 / span);
}

TEST_CASE("gap-only model oscillates at the bare gap") {
  const double xi = kTwoPi * 7.21e3;
  const auto model = gap_only_field(xi, kTwoPi * 1e3);
  const FrequencyScan scan = scan_and_extract_frequency(track(model, TimeGrid::uniform(0.0, 1e-3, 4001)));
  CHECK(scan.dominant_frequency == doctest::Approx(2.0 * 7.21e3).epsilon(1e-2));
  for (double q : scan.trace.qgp_phase) CHECK(std::abs(q) < 1e-9);
}

TEST_CASE("frequency rises with K when cos(theta) > 0") {
  double previous = 0.0;
  for (double K : {2.0, 3.0, 4.0, 5.0, 6.0}) {
    const RotatingFieldParams p{kNeutron.eta, kNeutron.xi, K};
    const auto traj = track(rotating_field(p), TimeGrid::uniform(0.0, 40.0 * drive_period(kNeutron), 8001));
    const double f = scan_and_extract_frequency(traj).dominant_frequency;
    CHECK(f > previous);
    previous = f;
  }
}

TEST_CASE("short or coarse grids are rejected with the required counts") {
  const double T = oscillation_period(kNeutron);
  CHECK_THROWS_WITH_AS(
      scan_and_extract_frequency(track(rotating_field(kNeutron), TimeGrid::uniform(0.0, 2.0 * T, 401))),
      doctest::Contains("at least 5 are required"), NumericalError);
  CHECK_THROWS_WITH_AS(
      scan_and_extract_frequency(track(rotating_field(kNeutron), TimeGrid::uniform(0.0, 10.0 * T, 151))),
      doctest::Contains("at least 20 are required"), NumericalError);
  CHECK_THROWS_AS(scan_and_extract_frequency(track(rotating_field(kNeutron), TimeGrid({0.0, 1e-7, 3e-7, 4e-7, 5e-7}))),
                  NumericalError);
}

TEST_CASE("periodogram peak of a pure cosine") {
  const double dt = 1e-3, f0 = 37.3;
  std::vector<double> x(2000);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::cos(kTwoPi * f0 * k * dt + 0.4);
  CHECK(periodogram_peak(x, dt).frequency == doctest::Approx(f0).epsilon(1e-3));
  CHECK(periodogram_peak(std::vector<double>(64, 1.0), dt).frequency == 0.0);
}
