#include <cmath>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/models.hpp"

namespace qgp {

double RotatingFieldParams::field_magnitude() const { return std::hypot(eta, xi); }
double RotatingFieldParams::cos_theta() const { return eta / field_magnitude(); }
double RotatingFieldParams::sin_theta() const { return xi / field_magnitude(); }

double AngleFunction::d1(double t) const {
  if (first) return first(t);
  return (value(t + fd_step) - value(t - fd_step)) / (2.0 * fd_step);
}

double AngleFunction::d2(double t) const {
  if (second) return second(t);
  if (first) return (first(t + fd_step) - first(t - fd_step)) / (2.0 * fd_step);
  return (value(t + fd_step) - 2.0 * value(t) + value(t - fd_step)) / (fd_step * fd_step);
}

AngleFunction AngleFunction::constant(double v) {
  AngleFunction f;
  f.value = [v](double) { return v; };
  f.first = [](double) { return 0.0; };
  f.second = [](double) { return 0.0; };
  return f;
}

AngleFunction AngleFunction::linear(double v0, double rate) {
  AngleFunction f;
  f.value = [v0, rate](double t) { return v0 + rate * t; };
  f.first = [rate](double) { return rate; };
  f.second = [](double) { return 0.0; };
  return f;
}

AngleFunction AngleFunction::sinusoid(double v0, double amplitude, double omega, double phase) {
  AngleFunction f;
  f.value = [=](double t) { return v0 + amplitude * std::sin(omega * t + phase); };
  f.first = [=](double t) { return amplitude * omega * std::cos(omega * t + phase); };
  f.second = [=](double t) { return -amplitude * omega * omega * std::sin(omega * t + phase); };
  return f;
}

GaugeTransform GaugeTransform::identity(std::size_t dim) {
  GaugeTransform g;
  g.phases.assign(dim, [](double) { return 0.0; });
  return g;
}

EigenSystem spin_half_frame(double magnitude, double mean, double theta, double phi) {
  EigenSystem es;
  es.values = {mean - magnitude, mean + magnitude};
  es.vectors = ComplexMatrix(2);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const Complex e = std::polar(1.0, phi);
  es.vectors(0, 0) = s;
  es.vectors(1, 0) = -e * c;
  es.vectors(0, 1) = c;
  es.vectors(1, 1) = e * s;
  return es;
}

namespace {

// B (sin th cos ph sigma_x + sin th sin ph sigma_y + cos th sigma_z)
ComplexMatrix spin_half_hamiltonian(double bx, double by, double bz) {
  return ComplexMatrix{bz, Complex{bx, -by}, Complex{bx, by}, -bz};
}

}  // namespace

ModelPtr rotating_field(const RotatingFieldParams& p) {
  if (!(p.eta > 0.0) || !(p.xi > 0.0) || !std::isfinite(p.K) || !std::isfinite(p.eta) ||
      !std::isfinite(p.xi)) {
    std::ostringstream msg;
    msg << "rotating_field needs eta > 0, xi > 0 and finite K (got eta=" << p.eta
        << ", xi=" << p.xi << ", K=" << p.K << ")";
    throw ConfigError(msg.str());
  }
  const double eta = p.eta, xi = p.xi;
  const double omega = p.rotation_rate();
  const double magnitude = p.field_magnitude();
  const double theta = std::atan2(xi, eta);

  auto model = std::make_shared<HamiltonianModel>();
  model->dim = 2;
  model->name = "rotating_field";
  model->parameters = {{"eta", eta}, {"xi", xi}, {"K", p.K}};
  model->h_at = [=](double t) {
    return spin_half_hamiltonian(xi * std::cos(omega * t), xi * std::sin(omega * t), eta);
  };
  model->dh_dt_at = [=](double t) {
    return spin_half_hamiltonian(-xi * omega * std::sin(omega * t),
                                 xi * omega * std::cos(omega * t), 0.0);
  };
  model->eigenframe_at = [=](double t) { return spin_half_frame(magnitude, 0.0, theta, omega * t); };
  model->characteristic_period = omega != 0.0 ? kTwoPi / std::abs(omega) : kTwoPi / magnitude;
  return model;
}

ModelPtr gap_only_field(double xi, double omega) {
  if (!(xi > 0.0) || !std::isfinite(omega)) throw ConfigError("gap_only_field needs xi > 0");
  auto model = std::make_shared<HamiltonianModel>();
  model->dim = 2;
  model->name = "gap_only_field";
  model->parameters = {{"eta", 0.0}, {"xi", xi}, {"omega", omega}};
  model->h_at = [=](double t) {
    return spin_half_hamiltonian(xi * std::cos(omega * t), xi * std::sin(omega * t), 0.0);
  };
  model->dh_dt_at = [=](double t) {
    return spin_half_hamiltonian(-xi * omega * std::sin(omega * t),
                                 xi * omega * std::cos(omega * t), 0.0);
  };
  model->eigenframe_at = [=](double t) { return spin_half_frame(xi, 0.0, 0.5 * kPi, omega * t); };
  model->characteristic_period = omega != 0.0 ? kTwoPi / std::abs(omega) : kTwoPi / xi;
  return model;
}

ModelPtr sphere_field(const SphereFieldParams& p) {
  if (p.B == 0.0 || !std::isfinite(p.B)) throw ConfigError("sphere_field needs a nonzero finite B");
  if (!p.theta.value || !p.phi.value) throw ConfigError("sphere_field needs theta(t) and phi(t)");
  const double b = p.B;
  const AngleFunction theta = p.theta;
  const AngleFunction phi = p.phi;

  auto model = std::make_shared<HamiltonianModel>();
  model->dim = 2;
  model->name = "sphere_field";
  model->parameters = {{"B", b}};
  model->h_at = [=](double t) {
    const double th = theta(t), ph = phi(t);
    return spin_half_hamiltonian(b * std::sin(th) * std::cos(ph), b * std::sin(th) * std::sin(ph),
                                 b * std::cos(th));
  };
  model->dh_dt_at = [=](double t) {
    const double th = theta(t), ph = phi(t);
    const double dth = theta.d1(t), dph = phi.d1(t);
    const double bx = b * (std::cos(th) * std::cos(ph) * dth - std::sin(th) * std::sin(ph) * dph);
    const double by = b * (std::cos(th) * std::sin(ph) * dth + std::sin(th) * std::cos(ph) * dph);
    const double bz = -b * std::sin(th) * dth;
    return spin_half_hamiltonian(bx, by, bz);
  };
  // For B < 0 the field direction is reversed, so the levels swap roles.
  model->eigenframe_at = [=](double t) {
    if (b > 0.0) return spin_half_frame(b, 0.0, theta(t), phi(t));
    return spin_half_frame(-b, 0.0, kPi - theta(t), phi(t) + kPi);
  };
  model->characteristic_period = kTwoPi / std::abs(b);
  return model;
}

ModelPtr custom_model(std::size_t dim, HamiltonianFn h_at, HamiltonianFn dh_dt_at,
                      std::vector<double> probe_times, std::string name,
                      double characteristic_period) {
  if (dim < 2) throw ConfigError("custom_model needs dim >= 2");
  if (!h_at) throw ConfigError("custom_model needs h_at");
  for (double t : probe_times) {
    const ComplexMatrix h = h_at(t);
    if (h.dim() != dim) {
      std::ostringstream msg;
      msg << "custom_model: h_at(" << t << ") has dimension " << h.dim() << ", expected " << dim;
      throw ConfigError(msg.str());
    }
    if (!h.is_hermitian()) {
      std::ostringstream msg;
      msg << "custom_model: h_at(t) is not Hermitian at t = " << t;
      throw NonHermitianError(msg.str(), h.hermiticity_deviation());
    }
  }
  auto model = std::make_shared<HamiltonianModel>();
  model->dim = dim;
  model->name = std::move(name);
  model->h_at = std::move(h_at);
  model->dh_dt_at = std::move(dh_dt_at);
  model->characteristic_period = characteristic_period;
  return model;
}

double fallback_derivative_step(const HamiltonianModel& model) {
  return 1e-6 * model.characteristic_period;
}

ComplexMatrix model_derivative(const HamiltonianModel& model, double t) {
  if (model.has_derivative()) return model.dh_dt_at(t);
  const double d = fallback_derivative_step(model);
  ComplexMatrix out = model.h_at(t + d) - model.h_at(t - d);
  out *= 1.0 / (2.0 * d);
  return out;
}

}  // namespace qgp
