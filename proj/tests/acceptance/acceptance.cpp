// One line per acceptance criterion. Exit status is the number of failures.
// A time limit of 0 means the criterion carries no runtime bound.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qgp/dynamics.hpp"
#include "qgp/gauge.hpp"
#include "qgp/geometry.hpp"
#include "qgp/interferometer.hpp"

using namespace qgp;

namespace {

const RotatingFieldParams kPreset{kTwoPi * 721e3, kTwoPi * 7.21e3, 5.0};

double drive_period(const RotatingFieldParams& p) { return kTwoPi / std::abs(p.rotation_rate()); }

struct Check {
  std::string label;
  bool ok = true;
  std::ostringstream detail;

  void expect(bool pass, const std::string& what, double value, const std::string& bound) {
    ok = ok && pass;
    detail << " " << what << "=" << value << " (" << bound << ")" << (pass ? "" : "!");
  }
};

int failures = 0;

void criterion(int id, const std::string& label, double time_limit, const std::function<void(Check&)>& body) {
  Check c{label};
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " threw: " << e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0.0)
    c.expect(elapsed < time_limit, "time_s", elapsed, "< " + std::to_string(static_cast<int>(time_limit)));
  else
    c.detail << " time_s=" << elapsed;
  if (!c.ok) ++failures;
  std::printf("%s [%d] %s:%s\n", c.ok ? "PASS" : "FAIL", id, label.c_str(), c.detail.str().c_str());
  std::fflush(stdout);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct RandomGauge {
  GaugeTransform transform;
  std::vector<std::function<double(double)>> rates;
};

RandomGauge random_gauge(std::mt19937_64& rng, double rate) {
  std::uniform_real_distribution<double> amp(-1.5, 1.5), freq(0.3, 2.0);
  RandomGauge g;
  for (int k = 0; k < 2; ++k) {
    const double a = amp(rng), b = freq(rng) * rate, c = amp(rng);
    g.transform.phases.push_back([=](double t) { return a * std::sin(b * t) + c * (1.0 - std::cos(b * t)); });
    g.rates.push_back([=](double t) { return a * b * std::cos(b * t) + c * b * std::sin(b * t); });
  }
  return g;
}

}  // namespace

int main() {
  const oracle::Rotating neutron{kPreset.eta, kPreset.xi, kPreset.K};

  criterion(1, "explicit-model QGP", 1.0, [&](Check& c) {
    const TimeGrid grid = TimeGrid::uniform(0.0, 5.0 * drive_period(kPreset), 2001);
    const auto model = rotating_field(kPreset);
    const auto analytic = qgp_direct(track(model, grid), 1, 0);
    const auto fd = qgp_direct(track(custom_model(2, model->h_at), grid), 1, 0);
    double ea = 0.0, ef = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      ea = std::max(ea, oracle::rel(analytic.delta[i], neutron.delta()));
      ef = std::max(ef, oracle::rel(fd.delta[i], neutron.delta()));
    }
    const double ratio = analytic.delta[grid.size() / 2] / kPreset.eta;
    c.expect(ea < 1e-6, "rel_err_analytic", ea, "< 1e-6");
    c.expect(ef < 1e-4, "rel_err_fd", ef, "< 1e-4");
    c.expect(std::abs(ratio / 10.0 - 1.0) < 1e-3, "delta_over_eta", ratio, "10 +- 0.1%");
  });

  criterion(2, "interference frequency", 10.0, [&](Check& c) {
    const auto traj = track(rotating_field(kPreset), TimeGrid::uniform(0.0, 20.0 * drive_period(kPreset), 4001));
    const FrequencyScan scan = scan_and_extract_frequency(traj);
    const double gap_hz = 2.0 * neutron.E() / kTwoPi;
    const double f = scan.dominant_frequency;
    c.expect(std::abs(f / 5.77e6 - 1.0) < 1e-2, "frequency_hz", f, "5.77e6 +- 1%");
    c.expect(f / gap_hz > 3.9 && f / gap_hz < 4.1, "frequency_to_gap", f / gap_hz, "in (3.9, 4.1)");
  });

  criterion(3, "adiabaticity", 30.0, [&](Check& c) {
    const auto traj = track(rotating_field(kPreset), TimeGrid::uniform(0.0, drive_period(kPreset), 2001));
    AdiabaticReportOptions opts;
    opts.compute_fidelity = true;
    opts.fidelity_level = 1;
    opts.propagation_tolerance = 1e-9;
    const AdiabaticityReport r = adiabatic_report(traj, 1, 0, opts);
    c.expect(r.max_ratio_qgp < 5e-3, "max_ratio_qgp", r.max_ratio_qgp, "< 5e-3");
    c.expect(oracle::rel(r.max_ratio_qgp, neutron.ratio_closed_form()) < 1e-6, "closed_form_rel_err",
             oracle::rel(r.max_ratio_qgp, neutron.ratio_closed_form()), "< 1e-6");
    c.expect(r.min_fidelity > 0.99, "min_fidelity", r.min_fidelity, "> 0.99");
  });

  criterion(4, "theta quantization", 60.0, [&](Check& c) {
    for (double th : {kPi / 6, kPi / 4, kPi / 3}) {
      const SphereCap cap = sphere_cap(1.0, th, 1.0, 256, 256);
      const ThetaResult r = theta_winding(cap.family, cap.loop, cap.surface, 1, 0);
      const double surface = -kTwoPi * (1.0 - std::cos(th)), boundary = kTwoPi * std::cos(th);
      const double oracle_theta = (surface - boundary) / kTwoPi;
      c.expect(r.residual < 1e-3 && r.nearest_integer == std::lround(oracle_theta), "residual", r.residual,
               "< 1e-3, nearest " + std::to_string(std::lround(oracle_theta)));
      c.expect(std::abs(r.theta - oracle_theta) < 1e-3, "theta_vs_closed_form", std::abs(r.theta - oracle_theta),
               "< 1e-3");
    }
    std::vector<double> res;
    for (std::size_t n : {64u, 128u, 256u}) {
      const SphereCap cap = sphere_cap(1.0, kPi / 4, 1.0, n, n);
      res.push_back(theta_winding(cap.family, cap.loop, cap.surface, 1, 0).residual);
    }
    const double order = std::log2(res[1] / res[2]);
    c.expect(std::abs(order - 2.0) < 0.2 && res[0] > res[1], "order", order, "2 +- 0.2");
  });

  criterion(5, "gauge invariance", 0.0, [&](Check& c) {
    const RotatingFieldParams p{1.0, 0.6, 1.5};
    const auto traj = track(rotating_field(p), TimeGrid::uniform(0.0, 8.0, 3201));
    AdiabaticReportOptions opts;
    opts.compute_fidelity = true;
    opts.fidelity_level = 1;
    const GeometricSeries d0 = qgp_direct(traj, 1, 0);
    const Interferometer i0(traj);
    const DifferentialTrace t0 = i0.trace();
    const AdiabaticityReport r0 = adiabatic_report(traj, 1, 0, opts);
    std::vector<double> A0[2] = {berry_connection(traj, 0), berry_connection(traj, 1)};
    double wd = 0, wi = 0, wdi = 0, wq = 0, wt = 0, wf = 0, wa = 0;
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 50; ++k) {
      const RandomGauge g = random_gauge(rng, 1.0);
      const auto moved = apply_gauge(traj, g.transform);
      wd = std::max(wd, max_diff(qgp_direct(moved, 1, 0).delta, d0.delta) / max_abs(d0.delta));
      const Interferometer im(moved);
      wdi = std::max(wdi, max_diff(im.trace().dI_dt2, t0.dI_dt2) / max_abs(t0.envelope));
      for (std::size_t a = 0; a < traj.size(); a += 160)
        for (std::size_t b = 0; b < traj.size(); b += 160)
          wi = std::max(wi, std::abs(im.intensity(a, b).intensity - i0.intensity(a, b).intensity));
      const AdiabaticityReport r = adiabatic_report(moved, 1, 0, opts);
      wq = std::max(wq, max_diff(r.ratio_qgp, r0.ratio_qgp) / r0.max_ratio_qgp);
      wt = std::max(wt, max_diff(r.ratio_traditional, r0.ratio_traditional) / r0.max_ratio_traditional);
      wf = std::max(wf, max_diff(r.fidelity_trace, r0.fidelity_trace));
      for (std::size_t level = 0; level < 2; ++level) {
        const std::vector<double> A = berry_connection(moved, level);
        for (std::size_t i = 0; i < traj.size(); ++i)
          wa = std::max(wa, std::abs(A[i] - A0[level][i] + g.rates[level](traj.grid()[i])));
      }
    }
    c.expect(wd < 1e-8, "delta", wd, "< 1e-8");
    c.expect(wi < 1e-8, "intensity", wi, "< 1e-8");
    c.expect(wdi < 1e-8, "dI_dt2", wdi, "< 1e-8");
    c.expect(wq < 1e-8, "ratio_qgp", wq, "< 1e-8");
    c.expect(wt < 1e-8, "ratio_traditional", wt, "< 1e-8");
    c.expect(wf < 1e-8, "fidelity", wf, "< 1e-8");
    c.expect(wa < 1e-8, "connection_shift", wa, "< 1e-8");
  });

  criterion(6, "three-formulation equivalence", 0.0, [&](Check& c) {
    const SphereFieldParams p{1.0, AngleFunction::sinusoid(kPi / 4, 0.1, 1.0), AngleFunction::linear(0.0, 1.0)};
    const auto traj = track(sphere_field(p), TimeGrid::uniform(0.0, kTwoPi, 10000));
    const auto d = qgp_direct(traj, 1, 0), m = qgp_compact(traj, 1, 0);
    std::vector<double> g(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) g[i] = qgp_geodesic(p, traj.grid()[i]);
    const double scale = max_abs(g);
    c.expect(max_diff(d.delta, g) / scale < 1e-4, "direct_vs_geodesic", max_diff(d.delta, g) / scale, "< 1e-4");
    c.expect(max_diff(m.delta, g) / scale < 1e-4, "compact_vs_geodesic", max_diff(m.delta, g) / scale, "< 1e-4");
    c.expect(max_diff(d.delta, m.delta) / scale < 1e-4, "direct_vs_compact", max_diff(d.delta, m.delta) / scale,
             "< 1e-4");
  });

  criterion(7, "first-order remainder", 0.0, [&](Check& c) {
    const double T = kTwoPi / std::abs(neutron.interference_rate());
    const auto traj = track(rotating_field(kPreset), TimeGrid::uniform(0.0, 2.0 * T, 2001));
    const Interferometer ifm(traj);
    const std::size_t i = 600;
    const double a = ifm.differential(i, DifferentialMode::analytic);
    std::vector<double> rem;
    for (double f : {1e-3, 5e-4, 2.5e-4}) {
      const double dt = f * T;
      rem.push_back(std::abs(2.0 * dt * ifm.finite_difference(i, dt) - 2.0 * a * dt));
    }
    const double p1 = std::log2(rem[0] / rem[1]), p2 = std::log2(rem[1] / rem[2]);
    c.expect(std::abs(p1 - 2.0) < 0.2, "exponent_1", p1, "2 +- 0.2");
    c.expect(std::abs(p2 - 2.0) < 0.2, "exponent_2", p2, "2 +- 0.2");
  });

  criterion(8, "gap-only control", 0.0, [&](Check& c) {
    const double xi = kPreset.xi;
    const auto traj = track(gap_only_field(xi, kTwoPi * 1e3), TimeGrid::uniform(0.0, 1e-3, 4001));
    const double f = scan_and_extract_frequency(traj).dominant_frequency;
    const double bare = 2.0 * xi / kTwoPi;
    c.expect(std::abs(f / bare - 1.0) < 1e-2, "frequency_hz", f, "2 xi / 2 pi = " + std::to_string(bare) + " +- 1%");
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
