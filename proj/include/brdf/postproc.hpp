#pragma once

#include <unordered_map>
#include <vector>

#include "brdf/brep.hpp"
#include "brdf/mct.hpp"
#include "brdf/mesh.hpp"

namespace brdf {

// Weighted least-squares polynomial fit of each coordinate against normalized
// arc length; degree 1 when its max residual stays below rho, else degree 3.
// Endpoints carry endpoint_weight so they stay put. Output keeps the point
// count, resampled at the original arc-length parameters.
std::vector<Vec3> fit_boundary(const std::vector<Vec3>& polyline, double endpoint_weight = 1000.0,
                               double rho = 0.002);

// Splits every triangle crossed by a boundary so boundary curves become mesh
// edges; each output triangle carries exactly one face label.
// crossing_pos maps a mesh edge key (lo<<32|hi) to the boundary point on that
// edge; covertex_pos maps an ABC triangle id to its interior point.
SegmentedMesh embed_boundaries(const LabeledSurfaceMesh& labeled,
                               const std::unordered_map<std::uint64_t, Vec3>& crossing_pos,
                               const std::unordered_map<std::uint64_t, Vec3>& covertex_pos);

// Jacobi-style Laplacian smoothing: interior vertices move toward the
// uniform neighbor average, boundary vertices average their two polyline
// neighbors, junctions stay fixed. Connectivity and labels unchanged.
SegmentedMesh smooth(const SegmentedMesh& mesh, const MeshTopology& topo, int iterations,
                     double damping = 0.5);
SegmentedMesh smooth_serial(const SegmentedMesh& mesh, const MeshTopology& topo, int iterations,
                            double damping = 0.5);

// Quadric edge collapse restricted to label-interior edges; boundary
// polylines and junction vertices are locked. Returns the simplified mesh and
// rewrites topo's vertex ids to match. target_ratio in (0,1].
SegmentedMesh simplify(const SegmentedMesh& mesh, MeshTopology& topo, double target_ratio);

struct PostprocOptions {
    double endpoint_weight = 1000.0;
    double fit_residual_threshold = 0.002;
    int smooth_iterations = 10;
    double smooth_damping = 0.5;
    double simplify_ratio = 0.5;
};

struct PostprocResult {
    SegmentedMesh mesh; // normalized coordinates
    MeshTopology topology;
    FacetedBRep brep;
};

// fit -> embed -> smooth -> simplify, preserving the B-Rep topology.
PostprocResult postprocess(const MctOutput& mct, const PostprocOptions& opts = {});

} // namespace brdf
