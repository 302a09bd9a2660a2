#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "brdf/mesh.hpp"

namespace brdf {

// Faceted B-Rep: a triangle mesh partitioned into labeled face patches, with
// boundary polylines (edges) and junction points (vertices) plus incidence.
struct FacetedBRep {
    SurfaceMesh mesh; // normalized coordinates

    std::vector<Vec3> vertices; // B-Rep vertices (junctions)

    struct Edge {
        int fa = -1, fb = -1;       // adjacent face labels, fa < fb
        std::vector<Vec3> polyline; // open: includes both endpoints; closed: no repeat
        int v0 = -1, v1 = -1;       // vertex ids for open edges
        bool closed = false;
    };
    std::vector<Edge> edges;

    struct Face {
        int label = -1;
        std::vector<int> triangles;
    };
    std::vector<Face> faces;
};

struct WatertightReport {
    bool watertight = false;
    std::vector<std::pair<int, int>> boundary_edges;   // incident to exactly 1 triangle
    std::vector<std::pair<int, int>> overshared_edges; // incident to 3+ triangles
    std::vector<int> isolated_vertices;
};

WatertightReport check_watertight(const SurfaceMesh& mesh);

struct TopologyReport {
    std::vector<std::string> violations;
    bool valid() const { return violations.empty(); }
};

// Runs every FacetedBRep invariant; empty report <=> valid.
TopologyReport validate_topology(const FacetedBRep& b);

// Entity counts, 4-bit quantized positions, and face-edge incidence records
// used for exact-topology comparison and duplicate detection.
struct TopologySignature {
    int v_count = 0, e_count = 0, f_count = 0;

    std::vector<std::array<int, 3>> qverts; // sorted quantized vertex buckets

    struct EdgeRec {
        std::array<int, 3> qa{}, qb{}; // quantized endpoints, qa <= qb (loop sample twice if closed)
        bool closed = false;
        int fa = -1, fb = -1; // original face labels
    };
    std::vector<EdgeRec> edges;

    std::vector<int> face_labels; // labels present, sorted
};

// bucket = floor((x+1)/2 * 16) clamped to [0,15]
int quantize_coord(double x);

TopologySignature topology_signature(const FacetedBRep& b);

enum class TopologyMatch { Same, Different, Indeterminate };

// Exact-match comparison up to face relabeling; canonical sorting of quantized
// records with a bounded permutation fallback for symmetric tie classes.
TopologyMatch compare_topology(const TopologySignature& a, const TopologySignature& b);

inline bool same_topology(const TopologySignature& a, const TopologySignature& b) {
    return compare_topology(a, b) == TopologyMatch::Same;
}

// Label-boundary structure of a segmented mesh, kept in terms of mesh vertex
// ids so post-processing can move vertices while preserving it.
struct MeshTopology {
    enum class VertexClass : std::uint8_t { Interior, Boundary, Junction };

    std::vector<VertexClass> vclass; // per mesh vertex
    std::vector<int> junctions;      // mesh vertex ids acting as B-Rep vertices

    struct Chain {
        int fa = -1, fb = -1;
        std::vector<int> verts; // open: junction ... junction; closed: cycle, no repeat
        bool closed = false;
        int v0 = -1, v1 = -1; // indices into junctions for open chains
    };
    std::vector<Chain> chains;
};

// Derives the B-Rep topology of a watertight segmented mesh from its label
// boundaries. Throws GeometryError on non-watertight input.
MeshTopology derive_topology(const SegmentedMesh& mesh);

FacetedBRep to_faceted_brep(const SegmentedMesh& mesh, const MeshTopology& topo);

} // namespace brdf
