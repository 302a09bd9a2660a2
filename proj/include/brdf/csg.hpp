#pragma once

#include <vector>

#include "brdf/brep.hpp"
#include "brdf/grid.hpp"

namespace brdf {

enum class BoolOp { Union, Intersection };

// Pointwise min (union) / max (intersection) of the SDFs on a common grid;
// UDF lists concatenated, values resampled but otherwise untouched.
// resolution 0 means "max of the inputs". Requires >= 2 models.
BrDf combine(const std::vector<const BrDf*>& models, BoolOp op, int resolution = 0);

// Drops faces the boolean buried entirely (no triangles and no boundary
// presence); faces that still border geometry are kept so the result stays
// topologically valid.
FacetedBRep prune_empty_faces(FacetedBRep b);

} // namespace brdf
