#pragma once

#include <cstdint>

#include "brdf/grid.hpp"

namespace brdf {

// Random synthetic BR-DF: the SDF is a smooth-min blend of 1-5 spheres and
// boxes kept well inside the domain, the UDFs measure distance to 3-15
// Voronoi seed sites placed on the blended surface. Deterministic per seed.
BrDf make_synthetic_brdf(std::uint64_t seed, int resolution = 64, double truncation = 0.1);

} // namespace brdf
