#pragma once

#include <optional>
#include <vector>

#include "qgp/geometry.hpp"
#include "qgp/models.hpp"
#include "qgp/numerics.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

/// e^{i phase} |phi_n(t)> with phase = -int_0^t (e_n - A_n).
struct AdiabaticState {
  std::size_t level = 0;
  double time = 0.0;
  double phase = 0.0;
  StateVector vector;
};

/// Adiabatic phases of one level for every grid sample, so repeated state
/// queries do not re-integrate.
class AdiabaticPhases {
 public:
  AdiabaticPhases(const GaugeTrajectory& traj, std::size_t level);

  std::size_t level() const { return level_; }
  const std::vector<double>& phases() const { return phases_; }
  const std::vector<double>& connection() const { return connection_; }
  AdiabaticState state(const GaugeTrajectory& traj, std::size_t i) const;

 private:
  std::size_t level_;
  std::vector<double> connection_;
  std::vector<double> phases_;
};

AdiabaticState adiabatic_state(const GaugeTrajectory& traj, std::size_t level, double t);

/// Schrodinger propagation of psi0 from t = 0 to t with the adaptive
/// midpoint-exponential integrator.
StateVector exact_state(const HamiltonianModel& model, const StateVector& psi0, double t,
                        double tolerance = 1e-9);

/// |<a|b>|^2. Throws NumericalError on mismatched dimensions or non-unit norms.
double fidelity(const StateVector& a, const StateVector& b);

/// <a|b>, kept for phase-sensitive comparisons.
Complex phase_overlap(const StateVector& a, const StateVector& b);

struct AdiabaticReportOptions {
  GeometryOptions geometry;
  /// Relative to max |e_m - e_n| along the grid.
  double gap_floor = 1e-9;
  /// Propagate phi_level(t0) exactly and compare with the adiabatic state.
  bool compute_fidelity = false;
  std::size_t fidelity_level = 0;
  double propagation_tolerance = 1e-9;
};

struct AdiabaticityReport {
  TimeGrid grid;
  std::vector<double> ratio_qgp;          // |<phi_m|dphi_n>| / |e_m - e_n + Delta_mn|
  std::vector<double> ratio_traditional;  // |<phi_m|dphi_n>| / |e_m - e_n|
  std::vector<bool> resonant;             // corrected gap below gap_floor
  double max_ratio_qgp = 0.0;
  double max_ratio_traditional = 0.0;
  std::vector<double> fidelity_trace;     // empty unless requested
  double min_fidelity = 1.0;
};

AdiabaticityReport adiabatic_report(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                                    const AdiabaticReportOptions& options = {});

}  // namespace qgp
