#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgp/numerics.hpp"

namespace qgp {

/// Instantaneous eigenpairs supplied in closed form by a model, ascending.
using EigenFrameFn = std::function<EigenSystem(double)>;

/// N-level Hermitian H(t). `dh_dt_at` and `eigenframe_at` are optional; an
/// empty function means "not available".
struct HamiltonianModel {
  std::size_t dim = 0;
  HamiltonianFn h_at;
  HamiltonianFn dh_dt_at;
  EigenFrameFn eigenframe_at;
  std::string name;
  std::map<std::string, double> parameters;
  /// Natural time scale, used for finite-difference fallbacks.
  double characteristic_period = 1.0;

  bool has_derivative() const { return static_cast<bool>(dh_dt_at); }
  bool has_analytic_frames() const { return static_cast<bool>(eigenframe_at); }
};

using ModelPtr = std::shared_ptr<const HamiltonianModel>;

/// h(t) = eta sigma_z + xi [sigma_x cos(2 K eta t) + sigma_y sin(2 K eta t)],
/// all energies in angular units.
struct RotatingFieldParams {
  double eta = 0.0;
  double xi = 0.0;
  double K = 0.0;

  double field_magnitude() const;  // sqrt(eta^2 + xi^2)
  double cos_theta() const;        // eta / sqrt(eta^2 + xi^2)
  double sin_theta() const;
  double rotation_rate() const { return 2.0 * K * eta; }
};

/// Scalar function of time with optional first and second derivatives.
struct AngleFunction {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;
  /// Step for central differences when a derivative is missing.
  double fd_step = 1e-5;

  double operator()(double t) const { return value(t); }
  double d1(double t) const;
  double d2(double t) const;

  static AngleFunction constant(double v);
  static AngleFunction linear(double v0, double rate);
  /// v0 + amplitude * sin(omega t + phase)
  static AngleFunction sinusoid(double v0, double amplitude, double omega, double phase = 0.0);
};

/// H = B n(t).sigma with n = (sin th cos ph, sin th sin ph, cos th).
struct SphereFieldParams {
  double B = 0.0;
  AngleFunction theta;
  AngleFunction phi;
};

/// Per-level phase functions f_n(t), with f_n(t0) = 0 at the trajectory start.
struct GaugeTransform {
  std::vector<std::function<double(double)>> phases;

  static GaugeTransform identity(std::size_t dim);
};

ModelPtr rotating_field(const RotatingFieldParams& p);

/// The rotating field with its sigma_z coupling removed: magnitude `xi`,
/// in-plane rotation at angular rate `omega`.
ModelPtr gap_only_field(double xi, double omega);

ModelPtr sphere_field(const SphereFieldParams& p);

/// Wraps a user Hamiltonian. Hermiticity is checked at each probe time and a
/// NonHermitianError names the first offending one.
ModelPtr custom_model(std::size_t dim, HamiltonianFn h_at, HamiltonianFn dh_dt_at = {},
                      std::vector<double> probe_times = {0.0}, std::string name = "custom",
                      double characteristic_period = 1.0);

/// Spin-1/2 frame in the explicit-model phase convention:
/// lower = (sin(th/2), -e^{i ph} cos(th/2)), upper = (cos(th/2), e^{i ph} sin(th/2)).
EigenSystem spin_half_frame(double magnitude, double mean, double theta, double phi);

/// Symmetric difference of h_at with the model's fallback step.
ComplexMatrix model_derivative(const HamiltonianModel& model, double t);

/// Fallback step: 1e-6 x characteristic period.
double fallback_derivative_step(const HamiltonianModel& model);

}  // namespace qgp
