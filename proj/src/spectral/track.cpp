#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

const char* to_string(GaugeMode mode) {
  switch (mode) {
    case GaugeMode::parallel_transport: return "parallel_transport";
    case GaugeMode::analytic: return "analytic";
    case GaugeMode::raw: return "raw";
    case GaugeMode::transformed: return "transformed";
  }
  return "unknown";
}

GaugeTrajectory::GaugeTrajectory(ModelPtr model, TimeGrid grid, GaugeMode mode,
                                 std::vector<std::vector<double>> eigenvalues,
                                 std::vector<ComplexMatrix> frames)
    : model_(std::move(model)),
      grid_(std::move(grid)),
      mode_(mode),
      eigenvalues_(std::move(eigenvalues)),
      frames_(std::move(frames)) {
  if (eigenvalues_.size() != grid_.size() || frames_.size() != grid_.size())
    throw NumericalError("trajectory data does not match its grid");
}

std::vector<double> GaugeTrajectory::eigenvalue_series(std::size_t level) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = eigenvalues_[i][level];
  return out;
}

double GaugeTrajectory::energy_scale(std::size_t i) const {
  double sum = 0.0;
  for (double e : eigenvalues_[i]) sum += e * e;
  return std::sqrt(sum);
}

GaugeTrajectory GaugeTrajectory::with_frames(std::vector<ComplexMatrix> frames,
                                             GaugeMode mode) const {
  return GaugeTrajectory(model_, grid_, mode, eigenvalues_, std::move(frames));
}

namespace {

EigenSystem solve_at(const HamiltonianModel& model, double t, double degeneracy_tolerance) {
  EighOptions opts;
  opts.degeneracy_tolerance = degeneracy_tolerance;
  try {
    return hermitian_eigh(model.h_at(t), opts);
  } catch (const DegenerateSpectrumError& e) {
    std::ostringstream msg;
    msg << "spectral gap collapses at t = " << t << ": " << e.what();
    throw DegenerateSpectrumError(msg.str(), e.level(), e.gap());
  }
}

// Reorders `next` so that column k continues column k of `reference`.
void match_levels(const ComplexMatrix& reference, EigenSystem& next, double t,
                  const TrackOptions& options) {
  const std::size_t n = reference.dim();
  std::vector<std::size_t> assignment(n);
  std::vector<bool> taken(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const StateVector ref = reference.column(j);
    double best = -1.0, second = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double ov = std::abs(inner(ref, next.vectors.column(k)));
      if (ov > best) {
        second = best;
        best = ov;
        best_k = k;
      } else if (ov > second) {
        second = ov;
      }
    }
    if (best < options.min_overlap) {
      std::ostringstream msg;
      msg << "grid too coarse: level " << j << " overlap " << best << " < " << options.min_overlap
          << " at t = " << t;
      throw NumericalError(msg.str());
    }
    if (best - second < options.ambiguity_margin) {
      std::ostringstream msg;
      msg << "ambiguous level assignment for level " << j << " at t = " << t;
      throw NumericalError(msg.str());
    }
    if (taken[best_k]) {
      std::ostringstream msg;
      msg << "level assignment is not a permutation at t = " << t;
      throw NumericalError(msg.str());
    }
    taken[best_k] = true;
    assignment[j] = best_k;
  }
  EigenSystem reordered;
  reordered.values.resize(n);
  reordered.vectors = ComplexMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    reordered.values[j] = next.values[assignment[j]];
    reordered.vectors.set_column(j, next.vectors.column(assignment[j]));
  }
  next = std::move(reordered);
}

// Index of the largest-modulus component of each column, fixed once at t0.
std::vector<std::size_t> reference_components(const ComplexMatrix& frame) {
  std::vector<std::size_t> out(frame.dim(), 0);
  for (std::size_t k = 0; k < frame.dim(); ++k) {
    double best = -1.0;
    for (std::size_t r = 0; r < frame.dim(); ++r) {
      if (std::abs(frame(r, k)) > best + 1e-12) {
        best = std::abs(frame(r, k));
        out[k] = r;
      }
    }
  }
  return out;
}

struct ComponentGauge {
  std::vector<std::size_t> components;
  std::vector<Complex> phases;  // unit phase each reference component keeps
};

ComponentGauge component_gauge(const ComplexMatrix& seed) {
  ComponentGauge g{reference_components(seed), {}};
  for (std::size_t k = 0; k < seed.dim(); ++k) {
    const Complex c = seed(g.components[k], k);
    g.phases.push_back(c / std::abs(c));
  }
  return g;
}

void fix_components(ComplexMatrix& frame, const ComponentGauge& gauge) {
  for (std::size_t k = 0; k < frame.dim(); ++k) {
    const Complex c = frame(gauge.components[k], k);
    if (std::abs(c) == 0.0) continue;
    const Complex phase = gauge.phases[k] * std::conj(c) / std::abs(c);
    for (std::size_t r = 0; r < frame.dim(); ++r) frame(r, k) *= phase;
  }
}

void transport_phases(const ComplexMatrix& reference, ComplexMatrix& frame) {
  for (std::size_t k = 0; k < frame.dim(); ++k) {
    const Complex ov = inner(reference.column(k), frame.column(k));
    const double mag = std::abs(ov);
    if (mag == 0.0) continue;
    const Complex phase = std::conj(ov) / mag;
    for (std::size_t r = 0; r < frame.dim(); ++r) frame(r, k) *= phase;
  }
}

}  // namespace

GaugeTrajectory track(ModelPtr model, const TimeGrid& grid, const TrackOptions& options) {
  if (!model) throw NumericalError("track needs a model");
  const std::size_t n = grid.size();
  std::vector<std::vector<double>> values;
  std::vector<ComplexMatrix> frames;
  values.reserve(n);
  frames.reserve(n);

  if (options.mode == GaugeMode::analytic) {
    if (!model->has_analytic_frames())
      throw NumericalError("model '" + model->name + "' has no analytic eigenframes");
    for (std::size_t i = 0; i < n; ++i) {
      EigenSystem es = model->eigenframe_at(grid[i]);
      const double floor = options.degeneracy_tolerance * model->h_at(grid[i]).frobenius_norm();
      for (std::size_t k = 0; k + 1 < es.values.size(); ++k) {
        if (es.values[k + 1] - es.values[k] <= floor) {
          std::ostringstream msg;
          msg << "spectral gap collapses at t = " << grid[i];
          throw DegenerateSpectrumError(msg.str(), k, es.values[k + 1] - es.values[k]);
        }
      }
      values.push_back(std::move(es.values));
      frames.push_back(std::move(es.vectors));
    }
    return GaugeTrajectory(std::move(model), grid, options.mode, std::move(values),
                           std::move(frames));
  }
  if (options.mode == GaugeMode::transformed)
    throw NumericalError("the transformed gauge is produced by apply_gauge, not track");

  EigenSystem first = solve_at(*model, grid[0], options.degeneracy_tolerance);
  if (model->has_analytic_frames()) {
    // Seed with the closed-form frame so every gauge mode shares the same
    // physical phases at t0.
    EigenSystem seed = model->eigenframe_at(grid[0]);
    match_levels(seed.vectors, first, grid[0], options);
    first.vectors = seed.vectors;
  } else {
    const ComponentGauge positive{reference_components(first.vectors),
                                  std::vector<Complex>(model->dim, Complex{1.0, 0.0})};
    fix_components(first.vectors, positive);
  }
  const ComponentGauge gauge = component_gauge(first.vectors);
  values.push_back(first.values);
  frames.push_back(first.vectors);

  for (std::size_t i = 1; i < n; ++i) {
    EigenSystem next = solve_at(*model, grid[i], options.degeneracy_tolerance);
    match_levels(frames.back(), next, grid[i], options);
    if (options.mode == GaugeMode::parallel_transport)
      transport_phases(frames.back(), next.vectors);
    else
      fix_components(next.vectors, gauge);
    values.push_back(std::move(next.values));
    frames.push_back(std::move(next.vectors));
  }
  return GaugeTrajectory(std::move(model), grid, options.mode, std::move(values),
                         std::move(frames));
}

TransportedTrajectory transport(const GaugeTrajectory& traj) {
  std::vector<ComplexMatrix> frames;
  frames.reserve(traj.size());
  std::vector<std::vector<double>> removed(traj.dim(), std::vector<double>(traj.size(), 0.0));
  frames.push_back(traj.frame(0));
  for (std::size_t i = 1; i < traj.size(); ++i) {
    ComplexMatrix f = traj.frame(i);
    for (std::size_t k = 0; k < traj.dim(); ++k) {
      const Complex ov = inner(frames.back().column(k), f.column(k));
      const double full = std::arg(ov);
      removed[k][i] = removed[k][i - 1] + std::remainder(full - removed[k][i - 1], 2.0 * kPi);
      const Complex phase = std::polar(1.0, -full);
      for (std::size_t r = 0; r < traj.dim(); ++r) f(r, k) *= phase;
    }
    frames.push_back(std::move(f));
  }
  return {traj.with_frames(std::move(frames), GaugeMode::parallel_transport), std::move(removed)};
}

StateVector frame_derivative(const GaugeTrajectory& traj, std::size_t level, std::size_t i) {
  StateVector out(traj.dim());
  for (const auto& term : derivative_stencil(traj.grid(), i)) {
    const ComplexMatrix& f = traj.frame(term.index);
    for (std::size_t r = 0; r < traj.dim(); ++r) out[r] += term.weight * f(r, level);
  }
  return out;
}

namespace {

Complex overlap_rate_at(const GaugeTrajectory& traj, std::size_t m, std::size_t n, std::size_t i,
                        OverlapMethod method) {
  if (m == n) throw NumericalError("overlap_rate needs m != n; use berry_connection for m == n");
  if (m >= traj.dim() || n >= traj.dim()) throw NumericalError("level index out of range");
  const double gap = traj.eigenvalue(i, n) - traj.eigenvalue(i, m);
  if (std::abs(gap) <= 1e-9 * traj.energy_scale(i)) {
    std::ostringstream msg;
    msg << "levels " << m << " and " << n << " are degenerate at t = " << traj.grid()[i];
    throw DegenerateSpectrumError(msg.str(), std::min(m, n), std::abs(gap));
  }
  const bool use_identity =
      method == OverlapMethod::identity ||
      (method == OverlapMethod::automatic && traj.model().has_derivative());
  if (use_identity) {
    const ComplexMatrix dh = model_derivative(traj.model(), traj.grid()[i]);
    return matrix_element(traj.vector(i, m), dh, traj.vector(i, n)) / gap;
  }
  return inner(traj.vector(i, m), frame_derivative(traj, n, i));
}

}  // namespace

Complex overlap_rate(const GaugeTrajectory& traj, std::size_t m, std::size_t n, double t,
                     OverlapMethod method) {
  return overlap_rate_at(traj, m, n, traj.grid().index_of(t), method);
}

std::vector<Complex> overlap_rate_series(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                                         OverlapMethod method) {
  std::vector<Complex> out(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) out[i] = overlap_rate_at(traj, m, n, i, method);
  return out;
}

EigenSystem aligned_frame(const HamiltonianModel& model, double t, const ComplexMatrix& reference,
                          double degeneracy_tolerance) {
  TrackOptions options;
  options.degeneracy_tolerance = degeneracy_tolerance;
  EigenSystem es = solve_at(model, t, degeneracy_tolerance);
  match_levels(reference, es, t, options);
  transport_phases(reference, es.vectors);
  return es;
}

}  // namespace qgp
