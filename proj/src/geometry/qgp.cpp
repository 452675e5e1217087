#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/geometry.hpp"

namespace qgp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_pair(const GaugeTrajectory& traj, std::size_t m, std::size_t n) {
  if (m == n) throw NumericalError("QGP needs two distinct levels");
  if (m >= traj.dim() || n >= traj.dim()) throw NumericalError("level index out of range");
}

double max_energy_scale(const GaugeTrajectory& traj) {
  double s = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) s = std::max(s, traj.energy_scale(i));
  return s;
}

// Marks samples valid/invalid from the overlap floor; returns true when the
// pair is uncoupled along the whole grid.
bool classify(const std::vector<Complex>& overlap, double energy_scale,
              const GeometryOptions& options, std::vector<bool>& valid) {
  double peak = 0.0;
  for (const auto& z : overlap) peak = std::max(peak, std::abs(z));
  valid.assign(overlap.size(), true);
  if (peak <= options.uncoupled_floor * energy_scale) return true;
  const double floor = options.overlap_floor * peak;
  for (std::size_t i = 0; i < overlap.size(); ++i) valid[i] = std::abs(overlap[i]) >= floor;
  return false;
}

// d/dt of the unwrapped argument on each maximal run of valid samples. Runs
// shorter than two samples become invalid.
std::vector<double> phase_rate(const std::vector<Complex>& z, const TimeGrid& grid,
                               std::vector<bool>& valid) {
  std::vector<double> rate(z.size(), kNaN);
  std::size_t i = 0;
  while (i < z.size()) {
    if (!valid[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < z.size() && valid[j]) ++j;
    if (j - i < 2) {
      valid[i] = false;
    } else {
      std::vector<double> args(j - i), times(j - i);
      for (std::size_t k = i; k < j; ++k) {
        args[k - i] = std::arg(z[k]);
        times[k - i] = grid[k];
      }
      const TimeGrid sub(std::move(times));
      const std::vector<double> d = differentiate(unwrap_phase(args), sub);
      std::copy(d.begin(), d.end(), rate.begin() + static_cast<std::ptrdiff_t>(i));
    }
    i = j;
  }
  return rate;
}

void accumulate(GeometricSeries& s) {
  s.accumulated_A_m = cumulative_integral(s.A_m, s.grid);
  s.accumulated_A_n = cumulative_integral(s.A_n, s.grid);
  s.accumulated_delta = cumulative_integral(s.delta, s.grid);
}

// -Im <phi|dphi> with the grid stencil; i <phi|dphi> is real for normalized
// frames.
std::vector<double> stencil_connection(const GaugeTrajectory& traj, std::size_t level) {
  std::vector<double> a(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    a[i] = -inner(traj.vector(i, level), frame_derivative(traj, level, i)).imag();
  return a;
}

// Connection of the input gauge: the transported frame's part minus the rate
// of the removed phase. Linear in the removed phase, so a gauge change shifts
// it by exactly the stencil derivative of f.
std::vector<double> connection(const TransportedTrajectory& tr, std::size_t level) {
  std::vector<double> a = stencil_connection(tr.traj, level);
  const std::vector<double> rate = differentiate(tr.removed[level], tr.traj.grid());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= rate[i];
  return a;
}

// Delta is evaluated on the transported frames, which every gauge of the same
// eigenbasis shares; the reported connections and overlaps are those of the
// input gauge.
GeometricSeries make_series(const TransportedTrajectory& tr, std::size_t m, std::size_t n) {
  GeometricSeries s{tr.traj.grid()};
  s.m = m;
  s.n = n;
  s.A_m = connection(tr, m);
  s.A_n = connection(tr, n);
  return s;
}

void restore_overlap_phase(const TransportedTrajectory& tr, GeometricSeries& s) {
  for (std::size_t i = 0; i < s.overlap.size(); ++i)
    s.overlap[i] *= std::polar(1.0, tr.removed[s.m][i] - tr.removed[s.n][i]);
}

}  // namespace

std::size_t GeometricSeries::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

std::vector<double> berry_connection(const GaugeTrajectory& traj, std::size_t level) {
  if (level >= traj.dim()) throw NumericalError("level index out of range");
  return connection(transport(traj), level);
}

GeometricSeries qgp_direct(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                           const GeometryOptions& options) {
  require_pair(traj, m, n);
  const TransportedTrajectory tr = transport(traj);
  GeometricSeries s = make_series(tr, m, n);
  s.overlap = overlap_rate_series(tr.traj, n, m, options.overlap_method);
  s.uncoupled = classify(s.overlap, max_energy_scale(traj), options, s.valid);

  std::vector<double> rate(traj.size(), 0.0);
  if (!s.uncoupled) rate = phase_rate(s.overlap, traj.grid(), s.valid);
  const std::vector<double> am = stencil_connection(tr.traj, m), an = stencil_connection(tr.traj, n);
  s.delta.resize(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    s.delta[i] = s.valid[i] ? am[i] - an[i] + rate[i] : kNaN;
  restore_overlap_phase(tr, s);
  accumulate(s);
  return s;
}

GeometricSeries qgp_compact(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                            const GeometryOptions& options) {
  require_pair(traj, m, n);
  const TransportedTrajectory tr = transport(traj);
  GeometricSeries s = make_series(tr, m, n);
  s.accumulated_A_m = cumulative_integral(s.A_m, s.grid);
  s.accumulated_A_n = cumulative_integral(s.A_n, s.grid);
  const std::vector<double> am = cumulative_integral(stencil_connection(tr.traj, m), s.grid);
  const std::vector<double> an = cumulative_integral(stencil_connection(tr.traj, n), s.grid);

  std::vector<ComplexMatrix> tilde;
  tilde.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ComplexMatrix f = tr.traj.frame(i);
    const Complex pm = std::polar(1.0, am[i]);
    const Complex pn = std::polar(1.0, an[i]);
    for (std::size_t r = 0; r < traj.dim(); ++r) {
      f(r, m) *= pm;
      f(r, n) *= pn;
    }
    tilde.push_back(std::move(f));
  }
  const GaugeTrajectory tilde_traj = tr.traj.with_frames(std::move(tilde), GaugeMode::transformed);

  s.overlap.resize(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    s.overlap[i] = inner(tilde_traj.vector(i, n), frame_derivative(tilde_traj, m, i));
  s.uncoupled = classify(s.overlap, max_energy_scale(traj), options, s.valid);

  if (s.uncoupled) {
    const std::vector<double> dm = stencil_connection(tr.traj, m), dn = stencil_connection(tr.traj, n);
    s.delta.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) s.delta[i] = dm[i] - dn[i];
  } else {
    s.delta = phase_rate(s.overlap, traj.grid(), s.valid);
  }
  for (std::size_t i = 0; i < traj.size(); ++i)
    s.overlap[i] *= std::polar(1.0, tr.removed[m][i] - tr.removed[n][i] + s.accumulated_A_m[i] -
                                        s.accumulated_A_n[i] - am[i] + an[i]);
  s.accumulated_delta = cumulative_integral(s.delta, s.grid);
  return s;
}

double qgp_geodesic(const SphereFieldParams& p, double t) {
  const double th = p.theta(t);
  const double dth = p.theta.d1(t), ddth = p.theta.d2(t);
  const double dph = p.phi.d1(t), ddph = p.phi.d2(t);
  const double s = std::sin(th), c = std::cos(th);
  const double speed2 = dth * dth + dph * dph * s * s;
  if (!(speed2 > 0.0)) {
    std::ostringstream msg;
    msg << "field direction is stationary at t = " << t << "; geodesic form undefined";
    throw NumericalError(msg.str());
  }
  const double numerator =
      dth * ddph * s + 2.0 * dth * dth * dph * c + dph * dph * dph * s * s * c - dph * ddth * s;
  return numerator / speed2;
}

}  // namespace qgp
