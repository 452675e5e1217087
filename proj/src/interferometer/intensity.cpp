#include <cmath>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/interferometer.hpp"

namespace qgp {

Interferometer::Interferometer(const GaugeTrajectory& traj, ArmAssignment arms,
                               const GeometryOptions& geometry)
    : traj_(traj),
      arms_(arms),
      qgp_(qgp_direct(traj, arms.second, arms.first, geometry)),
      first_(traj, arms.first),
      second_(traj, arms.second) {
  std::vector<double> rate(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    rate[i] = traj.eigenvalue(i, arms.first) - traj.eigenvalue(i, arms.second) + qgp_.delta[i];
  phase_arg_ = cumulative_integral(rate, traj.grid());
  phase_offset_ = std::arg(qgp_.overlap.front());
}

InterferogramRecord Interferometer::intensity(std::size_t i1, std::size_t i2) const {
  InterferogramRecord r;
  r.t1 = traj_.grid()[i1];
  r.t2 = traj_.grid()[i2];
  r.phase_first = first_.phases()[i1];
  r.phase_second = second_.phases()[i2];
  r.overlap = inner(traj_.vector(i1, arms_.first), traj_.vector(i2, arms_.second));
  r.intensity = 1.0 + std::real(std::polar(1.0, r.phase_second - r.phase_first) * r.overlap);
  return r;
}

double Interferometer::differential(std::size_t i, DifferentialMode mode, double dt) const {
  if (mode == DifferentialMode::finite_difference) return finite_difference(i, dt);
  if (!qgp_.valid[i] || !std::isfinite(phase_arg_[i])) {
    std::ostringstream msg;
    msg << "QGP is undefined on [" << traj_.grid().front() << ", " << traj_.grid()[i]
        << "]; differential intensity unavailable at t1 = " << traj_.grid()[i];
    throw NumericalError(msg.str());
  }
  return std::abs(qgp_.overlap[i]) * std::cos(phase_arg_[i] + phase_offset_);
}

double Interferometer::finite_difference(std::size_t i, double dt) const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw NumericalError("finite-difference step must be positive and finite");
  const double t1 = traj_.grid()[i];
  const EigenSystem off = aligned_frame(traj_.model(), t1 + dt, traj_.frame(i));
  const StateVector psi = off.vectors.column(arms_.second);
  // The connection picked up over [t1, t1 + dt] cancels against the phase of
  // the transported frame, so only the dynamic phase advances.
  const double e_mid = 0.5 * (traj_.eigenvalue(i, arms_.second) + off.values[arms_.second]);
  const double phase_second = second_.phases()[i] - e_mid * dt;
  const Complex overlap = inner(traj_.vector(i, arms_.first), psi);
  const double excess =
      std::real(std::polar(1.0, phase_second - first_.phases()[i]) * overlap);
  return excess / dt;
}

DifferentialTrace Interferometer::trace() const {
  DifferentialTrace t{traj_.grid()};
  const std::size_t n = traj_.size();
  t.dI_dt2.resize(n);
  t.envelope.resize(n);
  t.phase_arg = phase_arg_;
  t.phase_offset = phase_offset_;
  std::vector<double> dynamic(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.dI_dt2[i] = differential(i, DifferentialMode::analytic);
    t.envelope[i] = std::abs(qgp_.overlap[i]);
    dynamic[i] = traj_.eigenvalue(i, arms_.first) - traj_.eigenvalue(i, arms_.second);
  }
  const std::vector<double> dyn = cumulative_integral(dynamic, traj_.grid());
  t.qgp_phase.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.qgp_phase[i] = phase_arg_[i] - dyn[i];
  return t;
}

InterferogramRecord intensity(const GaugeTrajectory& traj, double t1, double t2,
                              ArmAssignment arms) {
  const std::size_t i1 = traj.grid().index_of(t1);
  const std::size_t i2 = traj.grid().index_of(t2);
  return Interferometer(traj, arms).intensity(i1, i2);
}

double differential_intensity(const GaugeTrajectory& traj, double t1, DifferentialMode mode,
                              double dt, ArmAssignment arms) {
  const std::size_t i = traj.grid().index_of(t1);
  return Interferometer(traj, arms).differential(i, mode, dt);
}

}  // namespace qgp
