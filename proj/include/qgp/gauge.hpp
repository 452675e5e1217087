#pragma once

#include "qgp/models.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

/// |phi_n(t)> -> e^{i f_n(t)} |phi_n(t)>. Eigenvalues are untouched. Throws
/// ConfigError unless f_n vanishes exactly at the first grid time.
GaugeTrajectory apply_gauge(const GaugeTrajectory& traj, const GaugeTransform& gauge);

}  // namespace qgp
