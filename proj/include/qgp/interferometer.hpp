#pragma once

// Two-arm interferometer built from adiabatic states of a tracked trajectory.
// The arm sampled at t1 carries level `first`, the arm sampled at t2 carries
// level `second`; both halves have amplitude 1/sqrt(2), so
//   I(t1, t2) = 1/2 |Phi_first(t1) + Phi_second(t2)|^2
//             = 1 + Re <Phi_first(t1)|Phi_second(t2)>.

#include <complex>
#include <vector>

#include "qgp/dynamics.hpp"
#include "qgp/geometry.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

struct ArmAssignment {
  std::size_t first = 0;   // lower level, "-"
  std::size_t second = 1;  // upper level, "+"

  ArmAssignment swapped() const { return {second, first}; }
};

struct InterferogramRecord {
  double t1 = 0.0;
  double t2 = 0.0;
  double intensity = 1.0;
  double phase_first = 0.0;   // adiabatic phase of the t1 arm
  double phase_second = 0.0;  // adiabatic phase of the t2 arm
  Complex overlap;            // <phi_first(t1)|phi_second(t2)>
};

enum class DifferentialMode { analytic, finite_difference };

/// t1 scan of dI/dt2 at t2 -> t1. With z = <phi_first|d/dt phi_second>:
///   dI/dt2 = |z(t1)| cos(phase_arg(t1) + phase_offset)
///   phase_arg(t1) = int_{t0}^{t1} (e_first - e_second + Delta_{second,first})
///   phase_offset = arg z(t0)
struct DifferentialTrace {
  TimeGrid grid;
  std::vector<double> dI_dt2;
  std::vector<double> envelope;
  std::vector<double> phase_arg;
  double phase_offset = 0.0;
  /// phase_arg minus the dynamic part int (e_first - e_second).
  std::vector<double> qgp_phase;
};

/// Caches the adiabatic phases and the QGP series of one trajectory so that
/// many (t1, t2) queries stay cheap.
class Interferometer {
 public:
  explicit Interferometer(const GaugeTrajectory& traj, ArmAssignment arms = {},
                          const GeometryOptions& geometry = {});

  const GaugeTrajectory& trajectory() const { return traj_; }
  const ArmAssignment& arms() const { return arms_; }
  const GeometricSeries& qgp() const { return qgp_; }

  InterferogramRecord intensity(std::size_t i1, std::size_t i2) const;
  /// Throws NumericalError when the QGP sample at i is invalid.
  double differential(std::size_t i, DifferentialMode mode, double dt = 0.0) const;
  /// (I(t1, t1 + dt) - 1) / dt with the t2 arm evaluated off the grid.
  double finite_difference(std::size_t i, double dt) const;
  DifferentialTrace trace() const;

 private:
  GaugeTrajectory traj_;
  ArmAssignment arms_;
  GeometricSeries qgp_;
  AdiabaticPhases first_;
  AdiabaticPhases second_;
  std::vector<double> phase_arg_;
  double phase_offset_ = 0.0;
};

InterferogramRecord intensity(const GaugeTrajectory& traj, double t1, double t2,
                              ArmAssignment arms = {});

double differential_intensity(const GaugeTrajectory& traj, double t1, DifferentialMode mode,
                              double dt = 0.0, ArmAssignment arms = {});

struct FrequencyOptions {
  double min_periods = 5.0;
  double min_samples_per_period = 20.0;
  /// Zero padding factor before the FFT (rounded up to a power of two).
  std::size_t padding = 8;
  ArmAssignment arms;
  GeometryOptions geometry;
};

struct FrequencyScan {
  DifferentialTrace trace;
  /// Cyclic frequency, in Hz when the grid is in seconds.
  double dominant_frequency = 0.0;
  /// |mean phase rate| / 2 pi, the expected frequency for constant-Delta models.
  double phase_rate_frequency = 0.0;
  /// Fewer than one oscillation over the grid: the peak sits in the lowest
  /// bins and the frequency is only bounded by 1 / span.
  bool below_resolution = false;
};

/// Hann-windowed periodogram of dI/dt2 over the trajectory grid with parabolic
/// refinement of the peak bin. Requires a uniform grid. Grids that see between
/// one and `min_periods` oscillations, or fewer than `min_samples_per_period`
/// samples per oscillation, are rejected with the required counts.
FrequencyScan scan_and_extract_frequency(const GaugeTrajectory& traj,
                                         const FrequencyOptions& options = {});

/// Index and parabolic-refined frequency of the strongest periodogram bin.
struct SpectralPeak {
  double frequency = 0.0;
  double power = 0.0;
  std::size_t bin = 0;
};
SpectralPeak periodogram_peak(const std::vector<double>& samples, double dt, std::size_t padding = 8);

}  // namespace qgp
