#pragma once

#include <stdexcept>
#include <string>

#include "brdf/brep.hpp"
#include "brdf/grid.hpp"
#include "brdf/mesh.hpp"

namespace brdf {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// OBJ with one group (`g face_<id>`) per B-Rep face; labels follow group
// order of first appearance. Quads and larger polygons are fan-triangulated.
// Ungrouped faces raise FormatError; non-manifold input sets manifold_warning.
SegmentedMesh read_segmented_obj(const std::string& path);

// Deterministic writer; vertices printed with 9 fractional digits.
void write_segmented_obj(const SegmentedMesh& mesh, const std::string& path);

// Binary container, little-endian:
//   magic "BRDF" | version u32 | resolution u32 | face_count u32 |
//   truncation f64 | center 3xf64 | scale f64 |
//   SDF r^3 x f32 | face_count x UDF r^3 x f32   (z fastest)
BrDf read_brdf(const std::string& path);
void write_brdf(const BrDf& b, const std::string& path);

// JSON document with vertices / edges / faces / incidence arrays, entities
// sorted by id, plus a companion segmented OBJ next to it (.obj suffix).
void write_brep_json(const FacetedBRep& b, const std::string& path);

// Mesh + per-triangle labels from the face assignment, labels remapped to
// face-list order.
SegmentedMesh brep_to_segmented(const FacetedBRep& b);

} // namespace brdf
