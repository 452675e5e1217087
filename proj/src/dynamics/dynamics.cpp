#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qgp/dynamics.hpp"
#include "qgp/error.hpp"

namespace qgp {

AdiabaticPhases::AdiabaticPhases(const GaugeTrajectory& traj, std::size_t level)
    : level_(level), connection_(berry_connection(traj, level)) {
  std::vector<double> rate(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    rate[i] = traj.eigenvalue(i, level) - connection_[i];
  phases_ = cumulative_integral(rate, traj.grid());
  for (auto& p : phases_) p = -p;
}

AdiabaticState AdiabaticPhases::state(const GaugeTrajectory& traj, std::size_t i) const {
  AdiabaticState s;
  s.level = level_;
  s.time = traj.grid()[i];
  s.phase = phases_[i];
  s.vector = std::polar(1.0, s.phase) * traj.vector(i, level_);
  return s;
}

AdiabaticState adiabatic_state(const GaugeTrajectory& traj, std::size_t level, double t) {
  if (level >= traj.dim()) throw NumericalError("level index out of range");
  const std::size_t i = traj.grid().index_of(t);
  return AdiabaticPhases(traj, level).state(traj, i);
}

StateVector exact_state(const HamiltonianModel& model, const StateVector& psi0, double t,
                        double tolerance) {
  if (t == 0.0) return psi0;
  PropagationOptions options;
  options.tolerance = tolerance;
  const TimeGrid grid(t > 0.0 ? std::vector<double>{0.0, t} : std::vector<double>{t, 0.0});
  if (t < 0.0) throw NumericalError("exact_state propagates forward in time only");
  return propagate(model.h_at, psi0, grid, options).states.back();
}

namespace {

void require_unit(const StateVector& v, const char* which) {
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "fidelity: state " << which << " is not normalized (norm " << v.norm() << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace

Complex phase_overlap(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw NumericalError("state dimensions differ");
  return inner(a, b);
}

double fidelity(const StateVector& a, const StateVector& b) {
  require_unit(a, "a");
  require_unit(b, "b");
  return std::clamp(std::norm(phase_overlap(a, b)), 0.0, 1.0);
}

AdiabaticityReport adiabatic_report(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                                    const AdiabaticReportOptions& options) {
  const GeometricSeries qgp = qgp_direct(traj, m, n, options.geometry);
  if (!qgp.all_valid())
    throw NumericalError("adiabatic_report needs valid QGP samples on the whole grid");

  AdiabaticityReport report{traj.grid()};
  const std::size_t size = traj.size();
  report.ratio_qgp.resize(size);
  report.ratio_traditional.resize(size);
  report.resonant.assign(size, false);

  double max_gap = 0.0;
  for (std::size_t i = 0; i < size; ++i)
    max_gap = std::max(max_gap, std::abs(traj.eigenvalue(i, m) - traj.eigenvalue(i, n)));
  const double floor = options.gap_floor * max_gap;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < size; ++i) {
    const double coupling = std::abs(qgp.overlap[i]);
    const double gap = traj.eigenvalue(i, m) - traj.eigenvalue(i, n);
    const double corrected = gap + qgp.delta[i];
    report.resonant[i] = std::abs(corrected) < floor;
    report.ratio_qgp[i] = report.resonant[i] ? kInf : coupling / std::abs(corrected);
    report.ratio_traditional[i] = coupling / std::abs(gap);
  }
  report.max_ratio_qgp = *std::max_element(report.ratio_qgp.begin(), report.ratio_qgp.end());
  report.max_ratio_traditional =
      *std::max_element(report.ratio_traditional.begin(), report.ratio_traditional.end());

  if (options.compute_fidelity) {
    const AdiabaticPhases phases(traj, options.fidelity_level);
    PropagationOptions prop;
    prop.tolerance = options.propagation_tolerance;
    const PropagationResult exact =
        propagate(traj.model().h_at, traj.vector(0, options.fidelity_level), traj.grid(), prop);
    report.fidelity_trace.resize(size);
    for (std::size_t i = 0; i < size; ++i)
      report.fidelity_trace[i] = std::norm(inner(phases.state(traj, i).vector, exact.states[i]));
    report.min_fidelity =
        *std::min_element(report.fidelity_trace.begin(), report.fidelity_trace.end());
  }
  return report;
}

}  // namespace qgp
