#pragma once

#include <memory>
#include <vector>

#include "brdf/grid.hpp"
#include "brdf/mesh.hpp"

namespace brdf {

// Axis-aligned box tree over a triangle subset; answers closest-point and
// ray-crossing queries.
class TriangleBvh {
public:
    TriangleBvh() = default;
    TriangleBvh(const std::vector<Vec3>& vertices, const std::vector<Tri>& triangles,
                std::vector<int> subset);

    // Smallest distance from p to any triangle in the subset.
    double distance(const Vec3& p) const;

    // Number of ray-triangle crossings with t > 0 along dir from origin p.
    int count_crossings(const Vec3& p, const Vec3& dir) const;

    bool empty() const { return nodes_.empty(); }

private:
    struct Node {
        Vec3 lo, hi;
        int left = -1, right = -1; // interior when left >= 0
        int first = 0, count = 0;  // leaf triangle range
    };
    std::vector<Node> nodes_;
    std::vector<int> tri_ids_;
    const std::vector<Vec3>* vertices_ = nullptr;
    const std::vector<Tri>* triangles_ = nullptr;

    int build(std::vector<int>& ids, int begin, int end);
};

// Distance queries against a segmented mesh: one global tree for the SDF and
// one per-face tree for the UDFs.
class MeshDistanceIndex {
public:
    explicit MeshDistanceIndex(const SegmentedMesh& mesh);

    // Magnitude = closest mesh distance; sign by ray-parity voting over the
    // three axis rays with a diagonal tie-break ray. Throws GeometryError if
    // the mesh is not watertight.
    double signed_distance(const Vec3& p) const;

    // Closest distance over all triangles (no sign).
    double unsigned_distance(const Vec3& p) const;

    // Closest distance over triangles labeled face_id. Throws on bad id.
    double unsigned_distance_to_face(int face_id, const Vec3& p) const;

    bool watertight() const { return watertight_; }
    int face_count() const { return static_cast<int>(face_trees_.size()); }

private:
    const SegmentedMesh& mesh_;
    TriangleBvh all_;
    std::vector<TriangleBvh> face_trees_;
    bool watertight_ = false;
};

// Samples SDF + per-face UDFs at every grid node; distances are stored in
// normalized units (world distance x transform.scale) and truncated.
BrDf encode_brdf(const SegmentedMesh& mesh, int resolution = 64, double truncation = 0.1);

// Serial reference for the OpenMP kernel above; identical output.
BrDf encode_brdf_serial(const SegmentedMesh& mesh, int resolution = 64, double truncation = 0.1);

} // namespace brdf
