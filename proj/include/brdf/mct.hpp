#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "brdf/brep.hpp"
#include "brdf/grid.hpp"
#include "brdf/mesh.hpp"

namespace brdf {

// Zero iso-surface extraction over the 256-case table; vertices deduplicated
// per grid edge so adjacent cubes share identical vertices. Throws
// GeometryError if the zero level set touches the domain boundary.
SurfaceMesh marching_cubes(const ScalarField3& sdf);

// Single-pass reference implementation; output is bit-identical to the
// parallel kernel above.
SurfaceMesh marching_cubes_serial(const ScalarField3& sdf);

// Surface mesh with per-vertex UDF samples and the UDF-minimal face label.
struct LabeledSurfaceMesh {
    SurfaceMesh mesh;
    int face_count = 0;
    std::vector<double> udf_values; // vertex-major: udf_values[v*F + f]
    std::vector<int> min_face;

    double udf(int v, int f) const {
        return udf_values[static_cast<std::size_t>(v) * face_count + f];
    }
};

// Deterministic tie perturbation: face f's value is biased by f * 1e-12, so
// the lowest index wins exact ties and shared-edge interpolation is stable.
inline double perturbed_udf(double value, int face) {
    return value + static_cast<double>(face) * 1e-12;
}

LabeledSurfaceMesh label_vertices(const SurfaceMesh& mesh, const BrDf& brdf);

// Root of the linear difference along an edge: t solves
// (1-t)(a1-b1) + t(a2-b2) = 0. Throws std::logic_error unless the difference
// changes sign (or starts/ends at zero) along the edge.
double edge_crossing(double a1, double b1, double a2, double b2);

// Barycentric point where the three linearly-interpolated UDFs are equal;
// centroid fallback when the 2x2 system is singular or the solution leaves
// the triangle.
Vec3 interior_covertex(const std::array<double, 3>& ua, const std::array<double, 3>& ub,
                       const std::array<double, 3>& uc);

struct SegmentEndpoint {
    enum Kind : std::uint8_t { EdgeCross, CoVertex } kind = EdgeCross;
    std::uint64_t key = 0; // EdgeCross: lo<<32|hi mesh vertex ids; CoVertex: triangle id
    Vec3 pos;
};

struct BoundarySegment {
    int fa = -1, fb = -1; // fa < fb
    SegmentEndpoint e0, e1;
};

// 3-way rule: AAA emits nothing, AAB one segment cutting the two mesh edges
// that separate the pair, ABC an interior co-vertex plus three segments.
void triangle_rule(const LabeledSurfaceMesh& labeled, int tri_id,
                   std::vector<BoundarySegment>& out);

std::vector<BoundarySegment> collect_segments(const LabeledSurfaceMesh& labeled);

FacetedBRep assemble_brep(const LabeledSurfaceMesh& labeled,
                          const std::vector<BoundarySegment>& segments);

// Full conversion with polyline provenance kept for post-processing.
struct MctOutput {
    LabeledSurfaceMesh labeled;
    std::vector<BoundarySegment> segments;
    FacetedBRep brep;

    struct PointRef {
        bool covertex = false;
        std::uint64_t key = 0; // mesh edge key or triangle id
    };
    std::vector<std::vector<PointRef>> edge_points; // parallel to brep.edges polylines
};

MctOutput run_mct(const BrDf& brdf);

} // namespace brdf
