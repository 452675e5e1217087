#pragma once

#include "qgp/geometry.hpp"

namespace qgp {

/// Sum of plaquette Berry phases of `level` over the cap mesh, rows summed in
/// a fixed order.
double cap_flux(const ParameterFamily& family, const CapSurface& surface, double period,
                std::size_t level, double degeneracy_tolerance);

}  // namespace qgp
