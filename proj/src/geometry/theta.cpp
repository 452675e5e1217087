#include <algorithm>
#include <cmath>
#include <sstream>

#include "geometry/cap_flux.hpp"
#include "qgp/error.hpp"
#include "qgp/geometry.hpp"

namespace qgp {
namespace {

double matrix_distance(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

}  // namespace

ThetaResult theta_winding(const ParameterFamily& family, const ClosedLoop& loop,
                          const CapSurface& surface, std::size_t m, std::size_t n,
                          const ThetaOptions& options) {
  if (m == n || m >= family.dim || n >= family.dim)
    throw NumericalError("theta_winding needs two distinct valid levels");
  if (!(loop.period > 0.0)) throw NumericalError("loop period must be positive");
  if (surface.radial_cells == 0 || surface.angular_cells == 0)
    throw NumericalError("cap mesh needs at least one cell in each direction");

  const ComplexMatrix h_start = family(loop.point(0.0));
  const double scale = std::max(1e-300, h_start.max_abs());
  if (matrix_distance(family(loop.point(loop.period)), h_start) > options.closure_tolerance * scale)
    throw NumericalError("loop is not closed: H(T) != H(0)");

  const std::size_t samples =
      options.boundary_samples != 0 ? options.boundary_samples : 4 * surface.angular_cells + 1;
  const TimeGrid grid = TimeGrid::uniform(0.0, loop.period, samples);

  double travel = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ComplexMatrix h = family(loop.point(grid[i]));
    travel = std::max(travel, matrix_distance(h, h_start));
    if (matrix_distance(family(surface.map(1.0, grid[i])), h) > 1e-9 * scale) {
      std::ostringstream msg;
      msg << "surface edge s = 1 does not follow the loop at t = " << grid[i];
      throw NumericalError(msg.str());
    }
  }

  ThetaResult result;
  result.surface_integral =
      cap_flux(family, surface, loop.period, m, options.degeneracy_tolerance) -
      cap_flux(family, surface, loop.period, n, options.degeneracy_tolerance);

  if (travel > options.closure_tolerance * scale) {
    auto model = custom_model(
        family.dim, [family, point = loop.point](double t) { return family(point(t)); }, {},
        {0.0}, "loop:" + family.name, loop.period);
    TrackOptions track_options;
    track_options.degeneracy_tolerance = options.degeneracy_tolerance;
    const GaugeTrajectory traj = track(model, grid, track_options);
    const GeometricSeries series = qgp_direct(traj, m, n, options.geometry);
    if (!series.all_valid())
      throw NumericalError("QGP is undefined on part of the boundary loop (overlap vanishes)");
    result.boundary_integral = integrate(series.delta, grid);
  }

  result.theta = (result.surface_integral - result.boundary_integral) / kTwoPi;
  result.nearest_integer = std::lround(result.theta);
  result.residual = std::abs(result.theta - static_cast<double>(result.nearest_integer));
  return result;
}

SphereCap sphere_cap(double B, double theta0, double omega, std::size_t radial_cells,
                     std::size_t angular_cells) {
  if (omega == 0.0) throw ConfigError("sphere cap needs a nonzero loop rate");
  SphereCap cap;
  cap.family = sphere_family(B);
  cap.loop.point = [theta0, omega](double t) { return ParameterPoint{theta0, omega * t}; };
  cap.loop.period = kTwoPi / std::abs(omega);
  cap.surface.map = [theta0, omega](double s, double t) {
    return ParameterPoint{s * theta0, omega * t};
  };
  cap.surface.radial_cells = radial_cells;
  cap.surface.angular_cells = angular_cells;
  return cap;
}

}  // namespace qgp
