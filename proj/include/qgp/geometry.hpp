#pragma once

// Gauge-invariant geometry of instantaneous eigenframes.
//
// Pair convention used throughout (levels m, n):
//   Delta_mn = A_m - A_n + d/dt arg <phi_n | d/dt phi_m>
//   F_mn     = F_m - F_n
//   2 pi Theta_mn = int_M F_mn - oint_{dM} Delta_mn dt
// with A_k = i <phi_k | d/dt phi_k> and F_k = dA_k on the parameter surface.
// For the rotating field this gives Delta(upper, lower) = 2 K eta cos(theta).
// Delta_nm = -Delta_mn.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "qgp/models.hpp"
#include "qgp/numerics.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

inline constexpr const char* kPairConvention =
    "Delta_mn = A_m - A_n + d/dt arg<phi_n|dphi_m/dt>; F_mn = F_m - F_n; "
    "A = i<phi|dphi>; F = dA on (u,v) with orientation du^dv; "
    "boundary traversed in increasing time; Theta = (int F_mn - oint Delta_mn)/2pi";

struct GeometryOptions {
  /// Samples with |<phi_n|dphi_m>| below this fraction of its grid maximum are
  /// masked invalid.
  double overlap_floor = 1e-12;
  /// A pair whose overlap never exceeds this fraction of the energy scale is
  /// treated as uncoupled: the arg term is dropped and every sample is valid.
  double uncoupled_floor = 1e-12;
  OverlapMethod overlap_method = OverlapMethod::automatic;
};

struct GeometricSeries {
  TimeGrid grid;
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> A_m;
  std::vector<double> A_n;
  std::vector<double> delta;     // NaN where invalid
  std::vector<Complex> overlap;  // <phi_n | d/dt phi_m>
  std::vector<double> accumulated_A_m;
  std::vector<double> accumulated_A_n;
  std::vector<double> accumulated_delta;
  std::vector<bool> valid;
  bool uncoupled = false;

  std::size_t valid_count() const;
  bool all_valid() const { return valid_count() == valid.size(); }
};

/// A_k(t) = i <phi_k | d/dt phi_k>, real part; frames differentiated on the grid.
std::vector<double> berry_connection(const GaugeTrajectory& traj, std::size_t level);

/// Delta_mn from the connections plus the unwrapped phase rate of the overlap.
GeometricSeries qgp_direct(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                           const GeometryOptions& options = {});

/// Delta_mn as the phase rate of <phi~_n | d/dt phi~_m> in the connection-free
/// basis |phi~_k> = exp(i int A_k) |phi_k>.
GeometricSeries qgp_compact(const GaugeTrajectory& traj, std::size_t m, std::size_t n,
                            const GeometryOptions& options = {});

/// Closed-form Delta(upper, lower) for H = B n(t).sigma with B > 0: geodesic
/// curvature of the path of n on the unit sphere times its speed. Throws
/// NumericalError where theta' = 0 and phi' sin(theta) = 0.
double qgp_geodesic(const SphereFieldParams& p, double t);

// ---------------------------------------------------------------------------
// Two-parameter families, curvature, winding number

using ParameterPoint = std::array<double, 2>;

struct ParameterFamily {
  std::size_t dim = 2;
  std::function<ComplexMatrix(double u, double v)> h_at;
  std::string name;

  ComplexMatrix operator()(const ParameterPoint& p) const { return h_at(p[0], p[1]); }
};

/// (theta, phi) -> B n(theta, phi).sigma
ParameterFamily sphere_family(double B);

/// Rectangular patch [u0, u1] x [v0, v1] divided into nu x nv cells.
struct PatchGrid {
  double u0 = 0.0, u1 = 1.0;
  std::size_t nu = 1;
  double v0 = 0.0, v1 = 1.0;
  std::size_t nv = 1;

  double du() const { return (u1 - u0) / static_cast<double>(nu); }
  double dv() const { return (v1 - v0) / static_cast<double>(nv); }
};

/// Plaquette curvature F^{uv} of each requested level at cell centers.
struct CurvatureField {
  PatchGrid patch;
  std::vector<std::size_t> levels;
  std::vector<std::vector<double>> flux;  // [slot][iu * nv + iv], plaquette Berry phase

  /// F^{uv} at the center of cell (iu, iv).
  double density(std::size_t slot, std::size_t iu, std::size_t iv) const;
  /// F^{mu nu} with mu, nu in {0 (u), 1 (v)}; antisymmetric by construction.
  double component(std::size_t slot, std::size_t iu, std::size_t iv, int mu, int nu) const;
  /// Sum of plaquette fluxes in row-major order.
  double total_flux(std::size_t slot) const;
  double center_u(std::size_t iu) const { return patch.u0 + (static_cast<double>(iu) + 0.5) * patch.du(); }
  double center_v(std::size_t iv) const { return patch.v0 + (static_cast<double>(iv) + 0.5) * patch.dv(); }
};

/// Gauge-invariant plaquette discretization: per-cell Berry phase divided by
/// the cell area. Levels are ascending at each node. Throws
/// DegenerateSpectrumError naming the node where the gap closes.
CurvatureField berry_curvature(const ParameterFamily& family, const PatchGrid& patch,
                               std::vector<std::size_t> levels, double degeneracy_tolerance = 1e-9);

/// Physical path through parameter space, closed after one period.
struct ClosedLoop {
  std::function<ParameterPoint(double t)> point;
  double period = 1.0;
};

/// Surface map (s, t) -> parameter point, s in [0, 1] from an interior point
/// (s = 0) out to the loop (s = 1), t in [0, period] along the loop.
struct CapSurface {
  std::function<ParameterPoint(double s, double t)> map;
  std::size_t radial_cells = 64;
  std::size_t angular_cells = 64;
};

struct ThetaOptions {
  /// Grid points for the boundary QGP integral; 0 picks 4 * angular_cells + 1.
  std::size_t boundary_samples = 0;
  GeometryOptions geometry;
  double closure_tolerance = 1e-12;
  double degeneracy_tolerance = 1e-9;
};

struct ThetaResult {
  double surface_integral = 0.0;
  double boundary_integral = 0.0;
  double theta = 0.0;
  long nearest_integer = 0;
  double residual = 0.0;
  std::string convention = kPairConvention;
};

ThetaResult theta_winding(const ParameterFamily& family, const ClosedLoop& loop,
                          const CapSurface& surface, std::size_t m, std::size_t n,
                          const ThetaOptions& options = {});

/// Constant-latitude loop theta = theta0 on the spin-1/2 sphere, traversed at
/// angular rate omega, capped from the north pole.
struct SphereCap {
  ParameterFamily family;
  ClosedLoop loop;
  CapSurface surface;
};
SphereCap sphere_cap(double B, double theta0, double omega, std::size_t radial_cells,
                     std::size_t angular_cells);

}  // namespace qgp
