#pragma once

#include <stdexcept>
#include <vector>

#include "brdf/vec3.hpp"

namespace brdf {

// Thrown for degenerate or inconsistent geometric input.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Maps world coordinates into the normalized [-1,1]^3 sampling cube.
struct NormalizeTransform {
    Vec3 center{0, 0, 0};
    double scale = 1.0; // world -> normalized multiplier, > 0

    Vec3 to_normalized(const Vec3& p) const { return (p - center) * scale; }
    Vec3 to_world(const Vec3& p) const { return p / scale + center; }
};

// Cube side is 1.4x the largest bbox extent (20% margin per side), centered
// on the bbox center, and normalized so the cube spans [-1,1]^3.
NormalizeTransform make_transform(const Vec3& bbox_min, const Vec3& bbox_max);

// One scalar sampled on a regular grid over [-1,1]^3, row-major with z fastest.
// Stored values are truncated to [-truncation, truncation].
struct ScalarField3 {
    int resolution = 64;
    double truncation = 0.1;
    NormalizeTransform transform;
    std::vector<float> values;

    ScalarField3() = default;
    ScalarField3(int res, double trunc, const NormalizeTransform& t)
        : resolution(res), truncation(trunc), transform(t),
          values(static_cast<std::size_t>(res) * res * res, 0.0f) {}

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * resolution + j) * resolution + k;
    }
    float at(int i, int j, int k) const { return values[index(i, j, k)]; }
    float& at(int i, int j, int k) { return values[index(i, j, k)]; }

    // Normalized coordinate of grid node i; nodes span the closed interval [-1,1].
    static double node_coord(int i, int res) {
        return -1.0 + 2.0 * static_cast<double>(i) / (res - 1);
    }
    Vec3 node_position(int i, int j, int k) const {
        return {node_coord(i, resolution), node_coord(j, resolution), node_coord(k, resolution)};
    }

    // Trilinear interpolation of the 8 surrounding nodes; exact at nodes.
    // Throws GeometryError if p is outside [-1,1]^3.
    double sample(const Vec3& p) const;
};

// An SDF plus one UDF per B-Rep face, all sharing grid and transform.
struct BrDf {
    ScalarField3 sdf;
    std::vector<ScalarField3> udfs;

    int face_count() const { return static_cast<int>(udfs.size()); }
    int resolution() const { return sdf.resolution; }
    double truncation() const { return sdf.truncation; }
    const NormalizeTransform& transform() const { return sdf.transform; }

    // Checks the shared-grid invariants; throws GeometryError on violation.
    void validate() const;
};

} // namespace brdf
