#include <cmath>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/geometry.hpp"
#include "geometry/cap_flux.hpp"

namespace qgp {

ParameterFamily sphere_family(double B) {
  if (B == 0.0) throw ConfigError("sphere family needs B != 0");
  ParameterFamily f;
  f.dim = 2;
  f.name = "sphere";
  f.h_at = [B](double theta, double phi) {
    const double bx = B * std::sin(theta) * std::cos(phi);
    const double by = B * std::sin(theta) * std::sin(phi);
    const double bz = B * std::cos(theta);
    return ComplexMatrix{bz, Complex{bx, -by}, Complex{bx, by}, -bz};
  };
  return f;
}

double CurvatureField::density(std::size_t slot, std::size_t iu, std::size_t iv) const {
  return flux[slot][iu * patch.nv + iv] / (patch.du() * patch.dv());
}

double CurvatureField::component(std::size_t slot, std::size_t iu, std::size_t iv, int mu,
                                 int nu) const {
  if (mu == nu) return 0.0;
  const double f = density(slot, iu, iv);
  return mu == 0 ? f : -f;
}

double CurvatureField::total_flux(std::size_t slot) const {
  double sum = 0.0;
  for (double f : flux[slot]) sum += f;
  return sum;
}

namespace {

// Eigenvectors of the requested levels at every node, row-major (iu, iv).
std::vector<std::vector<StateVector>> node_vectors(
    std::size_t rows, std::size_t cols, const std::function<ComplexMatrix(std::size_t, std::size_t)>& h,
    const std::function<ParameterPoint(std::size_t, std::size_t)>& where,
    const std::vector<std::size_t>& levels, double degeneracy_tolerance) {
  EighOptions opts;
  opts.degeneracy_tolerance = degeneracy_tolerance;
  std::vector<std::vector<StateVector>> out(levels.size(),
                                            std::vector<StateVector>(rows * cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      EigenSystem es;
      try {
        es = hermitian_eigh(h(i, j), opts);
      } catch (const DegenerateSpectrumError& e) {
        const ParameterPoint p = where(i, j);
        std::ostringstream msg;
        msg << "degeneracy inside the patch at (" << p[0] << ", " << p[1] << "): " << e.what();
        throw DegenerateSpectrumError(msg.str(), e.level(), e.gap());
      }
      for (std::size_t slot = 0; slot < levels.size(); ++slot)
        out[slot][i * cols + j] = es.vector(levels[slot]);
    }
  }
  return out;
}

// Berry phase of the cell loop (i,j) -> (i+1,j) -> (i+1,j+1) -> (i,j+1):
// -arg of the product of consecutive overlaps.
double plaquette_flux(const std::vector<StateVector>& v, std::size_t cols, std::size_t i,
                      std::size_t j) {
  const StateVector& a = v[i * cols + j];
  const StateVector& b = v[(i + 1) * cols + j];
  const StateVector& c = v[(i + 1) * cols + j + 1];
  const StateVector& d = v[i * cols + j + 1];
  const Complex loop = inner(a, b) * inner(b, c) * inner(c, d) * inner(d, a);
  return -std::arg(loop);
}

}  // namespace

CurvatureField berry_curvature(const ParameterFamily& family, const PatchGrid& patch,
                               std::vector<std::size_t> levels, double degeneracy_tolerance) {
  if (patch.nu == 0 || patch.nv == 0) throw NumericalError("patch needs at least one cell");
  for (std::size_t level : levels)
    if (level >= family.dim) throw NumericalError("level index out of range");
  const std::size_t rows = patch.nu + 1, cols = patch.nv + 1;
  auto where = [&](std::size_t i, std::size_t j) {
    return ParameterPoint{patch.u0 + static_cast<double>(i) * patch.du(),
                          patch.v0 + static_cast<double>(j) * patch.dv()};
  };
  const auto vectors = node_vectors(
      rows, cols, [&](std::size_t i, std::size_t j) { return family(where(i, j)); }, where, levels,
      degeneracy_tolerance);

  CurvatureField field{patch, levels, {}};
  field.flux.assign(levels.size(), std::vector<double>(patch.nu * patch.nv));
  for (std::size_t slot = 0; slot < levels.size(); ++slot)
    for (std::size_t i = 0; i < patch.nu; ++i)
      for (std::size_t j = 0; j < patch.nv; ++j)
        field.flux[slot][i * patch.nv + j] = plaquette_flux(vectors[slot], cols, i, j);
  return field;
}

// Plaquette flux over a cap mesh, shared with theta_winding.
double cap_flux(const ParameterFamily& family, const CapSurface& surface, double period,
                std::size_t level, double degeneracy_tolerance) {
  const std::size_t rows = surface.radial_cells + 1, cols = surface.angular_cells + 1;
  auto where = [&](std::size_t i, std::size_t j) {
    const double s = static_cast<double>(i) / static_cast<double>(surface.radial_cells);
    const double t = period * static_cast<double>(j) / static_cast<double>(surface.angular_cells);
    return surface.map(s, t);
  };
  const auto vectors = node_vectors(
      rows, cols, [&](std::size_t i, std::size_t j) { return family(where(i, j)); }, where,
      {level}, degeneracy_tolerance);
  double total = 0.0;
  for (std::size_t i = 0; i < surface.radial_cells; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < surface.angular_cells; ++j)
      row += plaquette_flux(vectors[0], cols, i, j);
    total += row;
  }
  return total;
}

}  // namespace qgp
