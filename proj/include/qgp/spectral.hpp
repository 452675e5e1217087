#pragma once

#include <vector>

#include "qgp/models.hpp"
#include "qgp/numerics.hpp"

namespace qgp {

enum class GaugeMode {
  parallel_transport,  // consecutive same-level overlaps real positive
  analytic,            // model-supplied eigenvectors verbatim
  raw,                 // solver output, one fixed component per level held at its t0 phase
  transformed,         // output of apply_gauge
};

const char* to_string(GaugeMode mode);

struct TrackOptions {
  GaugeMode mode = GaugeMode::parallel_transport;
  double degeneracy_tolerance = 1e-9;
  /// Smallest acceptable |<phi_k(t_i)|phi_k(t_{i+1})>|.
  double min_overlap = 0.9;
  /// Level matching is ambiguous when the two best overlaps are this close.
  double ambiguity_margin = 0.1;
};

/// Instantaneous eigenvalues and smoothly gauge-fixed eigenframes on a grid.
/// Level k is the k-th lowest level at the first grid time and is followed by
/// maximal overlap from there on.
class GaugeTrajectory {
 public:
  GaugeTrajectory(ModelPtr model, TimeGrid grid, GaugeMode mode,
                  std::vector<std::vector<double>> eigenvalues, std::vector<ComplexMatrix> frames);

  const HamiltonianModel& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const TimeGrid& grid() const { return grid_; }
  GaugeMode mode() const { return mode_; }
  std::size_t dim() const { return model_->dim; }
  std::size_t size() const { return grid_.size(); }

  double eigenvalue(std::size_t i, std::size_t level) const { return eigenvalues_[i][level]; }
  std::vector<double> eigenvalue_series(std::size_t level) const;
  const ComplexMatrix& frame(std::size_t i) const { return frames_[i]; }
  StateVector vector(std::size_t i, std::size_t level) const { return frames_[i].column(level); }

  /// Frobenius norm of H(t_i), rebuilt from the spectrum.
  double energy_scale(std::size_t i) const;

  GaugeTrajectory with_frames(std::vector<ComplexMatrix> frames, GaugeMode mode) const;

 private:
  ModelPtr model_;
  TimeGrid grid_;
  GaugeMode mode_;
  std::vector<std::vector<double>> eigenvalues_;
  std::vector<ComplexMatrix> frames_;
};

GaugeTrajectory track(ModelPtr model, const TimeGrid& grid, const TrackOptions& options = {});

/// Frames rephased so consecutive same-level overlaps are real positive, with
/// frame(0) kept. The removed phases are unwrapped:
/// traj.vector(i, k) = exp(i removed[k][i]) transported.vector(i, k). The
/// transported frames do not depend on the gauge of the input.
struct TransportedTrajectory {
  GaugeTrajectory traj;
  std::vector<std::vector<double>> removed;
};

TransportedTrajectory transport(const GaugeTrajectory& traj);

/// d/dt phi_level at sample i from the grid derivative stencil.
StateVector frame_derivative(const GaugeTrajectory& traj, std::size_t level, std::size_t i);

enum class OverlapMethod {
  automatic,          // identity when the model has dH/dt, else finite differences
  identity,           // <phi_m|dH/dt|phi_n> / (e_n - e_m)
  finite_difference,  // central differences of the gauge-fixed frames
};

/// <phi_m(t)|d/dt phi_n(t)> for m != n at a grid time.
Complex overlap_rate(const GaugeTrajectory& traj, std::size_t m, std::size_t n, double t,
                     OverlapMethod method = OverlapMethod::automatic);

std::vector<Complex> overlap_rate_series(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                                         OverlapMethod method = OverlapMethod::automatic);

/// Eigenframe at an off-grid time t, levels matched to `reference` by maximal
/// overlap and phases parallel transported from it.
EigenSystem aligned_frame(const HamiltonianModel& model, double t, const ComplexMatrix& reference,
                          double degeneracy_tolerance = 1e-9);

}  // namespace qgp
