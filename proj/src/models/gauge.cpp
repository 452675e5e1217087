#include <sstream>

#include "qgp/error.hpp"
#include "qgp/gauge.hpp"

namespace qgp {

GaugeTrajectory apply_gauge(const GaugeTrajectory& traj, const GaugeTransform& gauge) {
  if (gauge.phases.size() != traj.dim()) {
    std::ostringstream msg;
    msg << "gauge transform has " << gauge.phases.size() << " phase functions, trajectory has "
        << traj.dim() << " levels";
    throw ConfigError(msg.str());
  }
  const double t0 = traj.grid().front();
  for (std::size_t n = 0; n < gauge.phases.size(); ++n) {
    if (!gauge.phases[n]) throw ConfigError("gauge phase function is empty");
    const double f0 = gauge.phases[n](t0);
    if (f0 != 0.0) {
      std::ostringstream msg;
      msg << "gauge phase f_" << n << " must vanish at t0 = " << t0 << " (got " << f0 << ")";
      throw ConfigError(msg.str());
    }
  }
  std::vector<ComplexMatrix> frames;
  frames.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ComplexMatrix f = traj.frame(i);
    for (std::size_t n = 0; n < traj.dim(); ++n) {
      const Complex phase = std::polar(1.0, gauge.phases[n](traj.grid()[i]));
      for (std::size_t r = 0; r < traj.dim(); ++r) f(r, n) *= phase;
    }
    frames.push_back(std::move(f));
  }
  return traj.with_frames(std::move(frames), GaugeMode::transformed);
}

}  // namespace qgp
