#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/numerics.hpp"

namespace qgp {
namespace {

StateVector midpoint_step(const HamiltonianFn& h_of_t, const StateVector& psi, double t, double h) {
  return unitary_step(h_of_t(t + 0.5 * h), h) * psi;
}

void require_normalized(const StateVector& psi0) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9)
    throw NumericalError("initial state is not normalized");
}

}  // namespace

PropagationResult propagate(const HamiltonianFn& h_of_t, const StateVector& psi0,
                            const TimeGrid& grid, const PropagationOptions& options) {
  require_normalized(psi0);
  // Local error of the midpoint exponential is O(h^3); comparing one step of
  // size h with two of size h/2 estimates the error of the finer pair as
  // |difference| / (2^2 - 1).
  constexpr double kOrder = 2.0;
  const double tol = options.tolerance;
  const double min_step = options.min_relative_step * std::max(grid.span(), std::abs(grid.back()));

  PropagationResult result;
  result.states.reserve(grid.size());
  result.states.push_back(psi0);

  StateVector psi = psi0;
  double t = grid.front();
  double h = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
  {
    const double scale = h_of_t(t).frobenius_norm();
    if (scale > 0.0) h = std::min(h, 0.1 / scale);
  }

  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double target = grid[i];
    while (t < target) {
      const bool last = t + h * (1.0 + 1e-6) >= target;
      const double step = last ? target - t : h;
      const StateVector coarse = midpoint_step(h_of_t, psi, t, step);
      const StateVector half = midpoint_step(h_of_t, psi, t, 0.5 * step);
      const StateVector fine = midpoint_step(h_of_t, half, t + 0.5 * step, 0.5 * step);
      const double err = distance(coarse, fine) / (std::pow(2.0, kOrder) - 1.0);
      if (!std::isfinite(err)) throw PropagationError("non-finite state during propagation", t);

      if (err <= tol) {
        psi = fine;
        t = last ? target : t + step;
        result.error_estimate += err;
        ++result.steps;
        if (result.steps > options.max_steps) throw PropagationError("step budget exhausted", t);
      } else {
        ++result.rejected;
      }
      const double factor =
          err > 0.0 ? 0.9 * std::pow(tol / err, 1.0 / (kOrder + 1.0)) : 4.0;
      const double scale = std::clamp(factor, 0.2, 4.0);
      // A truncated final step says nothing about the natural step size.
      if (last && err <= tol)
        h *= std::min(scale, 1.0);
      else
        h = step * scale;
      if (h < min_step) {
        std::ostringstream msg;
        msg << "step size underflow (h = " << h << ") at t = " << t;
        throw PropagationError(msg.str(), t);
      }
    }
    result.states.push_back(psi);
  }
  return result;
}

std::vector<StateVector> propagate_fixed(const HamiltonianFn& h_of_t, const StateVector& psi0,
                                         const TimeGrid& grid, std::size_t substeps) {
  require_normalized(psi0);
  if (substeps == 0) throw NumericalError("substep count must be positive");
  std::vector<StateVector> states;
  states.reserve(grid.size());
  states.push_back(psi0);
  StateVector psi = psi0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = (grid[i] - grid[i - 1]) / static_cast<double>(substeps);
    for (std::size_t k = 0; k < substeps; ++k)
      psi = midpoint_step(h_of_t, psi, grid[i - 1] + static_cast<double>(k) * h, h);
    states.push_back(psi);
  }
  return states;
}

}  // namespace qgp
