#pragma once

#include <utility>
#include <vector>

#include "brdf/grid.hpp"
#include "brdf/vec3.hpp"

namespace brdf {

// Plain triangle surface (marching cubes output, world or normalized coords).
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> triangles;

    bool empty() const { return triangles.empty(); }
};

// Triangle mesh with one B-Rep face label per triangle.
struct SegmentedMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> triangles;
    std::vector<int> labels;
    int face_count = 0;
    bool manifold_warning = false; // set by the loader on non-manifold input

    SurfaceMesh surface() const { return {vertices, triangles}; }

    std::pair<Vec3, Vec3> bbox() const;

    // Removes zero-area triangles; keeps labels aligned.
    void drop_degenerate_triangles(double area_eps = 1e-14);

    // Checks label range, per-face coverage and triangle sanity.
    // Throws GeometryError on violation.
    void validate() const;

    // True iff every undirected edge is shared by exactly two triangles.
    bool is_watertight() const;
};

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

// Closest point on triangle abc to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

} // namespace brdf
