#include "brdf/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace brdf {

std::pair<Vec3, Vec3> SegmentedMesh::bbox() const {
    if (vertices.empty())
        throw GeometryError("bbox: empty mesh");
    Vec3 lo = vertices[0], hi = vertices[0];
    for (const Vec3& v : vertices) {
        lo = min(lo, v);
        hi = max(hi, v);
    }
    return {lo, hi};
}

void SegmentedMesh::drop_degenerate_triangles(double area_eps) {
    std::size_t kept = 0;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const Tri& tr = triangles[t];
        bool repeated = tr[0] == tr[1] || tr[1] == tr[2] || tr[0] == tr[2];
        if (!repeated && triangle_area(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]) > area_eps) {
            triangles[kept] = triangles[t];
            labels[kept] = labels[t];
            ++kept;
        }
    }
    triangles.resize(kept);
    labels.resize(kept);
}

void SegmentedMesh::validate() const {
    if (triangles.size() != labels.size())
        throw GeometryError("SegmentedMesh: label count does not match triangle count");
    if (face_count < 1)
        throw GeometryError("SegmentedMesh: face count must be >= 1");
    std::vector<int> per_face(face_count, 0);
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (int c = 0; c < 3; ++c)
            if (triangles[t][c] < 0 || triangles[t][c] >= static_cast<int>(vertices.size()))
                throw GeometryError("SegmentedMesh: triangle vertex index out of range");
        if (labels[t] < 0 || labels[t] >= face_count)
            throw GeometryError("SegmentedMesh: label out of range");
        per_face[labels[t]] += 1;
    }
    for (int f = 0; f < face_count; ++f)
        if (per_face[f] == 0)
            throw GeometryError("SegmentedMesh: face " + std::to_string(f) + " has no triangles");
}

bool SegmentedMesh::is_watertight() const {
    if (triangles.empty())
        return false;
    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(triangles.size() * 3);
    for (const Tri& t : triangles) {
        for (int c = 0; c < 3; ++c) {
            std::uint64_t a = t[c], b = t[(c + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_count[(a << 32) | b] += 1;
        }
    }
    for (const auto& [key, count] : edge_count)
        if (count != 2)
            return false;
    return true;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

// Ericson-style case analysis over the triangle's Voronoi regions.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double v = d1 / (d1 - d3);
        return a + ab * v;
    }

    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double w = d2 / (d2 - d6);
        return a + ac * w;
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return a + ab * v + ac * w;
}

} // namespace brdf
