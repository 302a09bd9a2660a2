// Primitive-suite fixtures shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "brdf/mesh.hpp"

namespace brdf::fixtures {

struct MeshBuilder {
    SegmentedMesh mesh;
    std::map<std::tuple<double, double, double>, int> ids;

    int vertex(const Vec3& p) {
        auto key = std::make_tuple(p.x, p.y, p.z);
        auto it = ids.find(key);
        if (it != ids.end())
            return it->second;
        int id = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        ids.emplace(key, id);
        return id;
    }
    void tri(const Vec3& a, const Vec3& b, const Vec3& c, int label) {
        mesh.triangles.push_back({vertex(a), vertex(b), vertex(c)});
        mesh.labels.push_back(label);
    }
    // corners counter-clockwise seen from outside
    void quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, int label) {
        tri(a, b, c, label);
        tri(a, c, d, label);
    }
    SegmentedMesh finish(int face_count) {
        mesh.face_count = face_count;
        mesh.validate();
        return mesh;
    }
};

// Axis-aligned box, one face label per side, centered at the origin.
inline SegmentedMesh make_box(double sx, double sy, double sz, int subdiv = 1) {
    double hx = sx / 2, hy = sy / 2, hz = sz / 2;
    MeshBuilder b;
    // parametrize each side as an n x n grid so tests can request density
    auto side = [&](Vec3 origin, Vec3 du, Vec3 dv, int label) {
        for (int i = 0; i < subdiv; ++i)
            for (int j = 0; j < subdiv; ++j) {
                double u0 = static_cast<double>(i) / subdiv, u1 = static_cast<double>(i + 1) / subdiv;
                double v0 = static_cast<double>(j) / subdiv, v1 = static_cast<double>(j + 1) / subdiv;
                b.quad(origin + du * u0 + dv * v0, origin + du * u1 + dv * v0,
                       origin + du * u1 + dv * v1, origin + du * u0 + dv * v1, label);
            }
    };
    side({-hx, -hy, -hz}, {0, 2 * hy, 0}, {2 * hx, 0, 0}, 0);  // z- (normal -z)
    side({-hx, -hy, +hz}, {2 * hx, 0, 0}, {0, 2 * hy, 0}, 1);  // z+
    side({-hx, -hy, -hz}, {2 * hx, 0, 0}, {0, 0, 2 * hz}, 2);  // y-
    side({-hx, +hy, -hz}, {0, 0, 2 * hz}, {2 * hx, 0, 0}, 3);  // y+
    side({-hx, -hy, -hz}, {0, 0, 2 * hz}, {0, 2 * hy, 0}, 4);  // x-
    side({+hx, -hy, -hz}, {0, 2 * hy, 0}, {0, 0, 2 * hz}, 5);  // x+
    return b.finish(6);
}

// Simple-polygon triangulation by ear clipping (profile counter-clockwise).
inline std::vector<std::array<int, 3>> ear_clip(const std::vector<std::pair<double, double>>& poly) {
    std::vector<int> order(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i)
        order[i] = static_cast<int>(i);
    std::vector<std::array<int, 3>> tris;
    auto cross2 = [&](int a, int b, int c) {
        return (poly[b].first - poly[a].first) * (poly[c].second - poly[a].second) -
               (poly[b].second - poly[a].second) * (poly[c].first - poly[a].first);
    };
    auto inside = [&](int a, int b, int c, int p) {
        return cross2(a, b, p) > 0 && cross2(b, c, p) > 0 && cross2(c, a, p) > 0;
    };
    while (order.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < order.size(); ++i) {
            int a = order[(i + order.size() - 1) % order.size()];
            int b = order[i];
            int c = order[(i + 1) % order.size()];
            if (cross2(a, b, c) <= 1e-12)
                continue;
            bool ear = true;
            for (int p : order)
                if (p != a && p != b && p != c && inside(a, b, c, p)) {
                    ear = false;
                    break;
                }
            if (!ear)
                continue;
            tris.push_back({a, b, c});
            order.erase(order.begin() + i);
            clipped = true;
            break;
        }
        if (!clipped)
            break; // degenerate input
    }
    tris.push_back({order[0], order[1], order[2]});
    return tris;
}

// Prism over a counter-clockwise profile: one label per side wall, then
// bottom, then top. Centered on the profile bbox center and z = 0.
inline SegmentedMesh make_extrusion(const std::vector<std::pair<double, double>>& profile,
                                    double height) {
    double lox = profile[0].first, hix = lox, loy = profile[0].second, hiy = loy;
    for (auto& [x, y] : profile) {
        lox = std::min(lox, x);
        hix = std::max(hix, x);
        loy = std::min(loy, y);
        hiy = std::max(hiy, y);
    }
    double cx = (lox + hix) / 2, cy = (loy + hiy) / 2, hz = height / 2;
    auto at = [&](int i, double z) {
        return Vec3{profile[i].first - cx, profile[i].second - cy, z};
    };

    const int n = static_cast<int>(profile.size());
    MeshBuilder b;
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        b.quad(at(i, -hz), at(j, -hz), at(j, +hz), at(i, +hz), i);
    }
    auto caps = ear_clip(profile);
    for (const auto& t : caps) {
        b.tri(at(t[0], -hz), at(t[2], -hz), at(t[1], -hz), n);     // bottom, outward -z
        b.tri(at(t[0], +hz), at(t[1], +hz), at(t[2], +hz), n + 1); // top, outward +z
    }
    return b.finish(n + 2);
}

// Box with a rectangular slot cut straight through along z.
// Labels: 0..3 outer walls (x-,x+,y-,y+), 4..7 slot walls, 8 bottom, 9 top.
inline SegmentedMesh make_slotted_box(double sx, double sy, double sz, double wx, double wy) {
    double hx = sx / 2, hy = sy / 2, hz = sz / 2, qx = wx / 2, qy = wy / 2;
    MeshBuilder b;
    b.quad({-hx, -hy, -hz}, {-hx, -hy, +hz}, {-hx, +hy, +hz}, {-hx, +hy, -hz}, 0); // x-
    b.quad({+hx, -hy, -hz}, {+hx, +hy, -hz}, {+hx, +hy, +hz}, {+hx, -hy, +hz}, 1); // x+
    b.quad({-hx, -hy, -hz}, {+hx, -hy, -hz}, {+hx, -hy, +hz}, {-hx, -hy, +hz}, 2); // y-
    b.quad({-hx, +hy, -hz}, {-hx, +hy, +hz}, {+hx, +hy, +hz}, {+hx, +hy, -hz}, 3); // y+
    // slot walls face inward
    b.quad({-qx, -qy, -hz}, {-qx, +qy, -hz}, {-qx, +qy, +hz}, {-qx, -qy, +hz}, 4); // slot x-
    b.quad({+qx, -qy, -hz}, {+qx, -qy, +hz}, {+qx, +qy, +hz}, {+qx, +qy, -hz}, 5); // slot x+
    b.quad({-qx, -qy, -hz}, {-qx, -qy, +hz}, {+qx, -qy, +hz}, {+qx, -qy, -hz}, 6); // slot y-
    b.quad({-qx, +qy, -hz}, {+qx, +qy, -hz}, {+qx, +qy, +hz}, {-qx, +qy, +hz}, 7); // slot y+

    // caps are rings: four trapezoids between the outer and inner rectangle
    auto ring = [&](double z, bool top) {
        int label = top ? 9 : 8;
        Vec3 o[4] = {{-hx, -hy, z}, {+hx, -hy, z}, {+hx, +hy, z}, {-hx, +hy, z}};
        Vec3 q[4] = {{-qx, -qy, z}, {+qx, -qy, z}, {+qx, +qy, z}, {-qx, +qy, z}};
        for (int s = 0; s < 4; ++s) {
            int t = (s + 1) % 4;
            if (top)
                b.quad(o[s], o[t], q[t], q[s], label);
            else
                b.quad(o[s], q[s], q[t], o[t], label);
        }
    };
    ring(+hz, true);
    ring(-hz, false);
    return b.finish(10);
}

inline SegmentedMesh rotate_mesh(SegmentedMesh mesh, double z_deg, double x_deg) {
    double cz = std::cos(z_deg * M_PI / 180.0), sz = std::sin(z_deg * M_PI / 180.0);
    double cx = std::cos(x_deg * M_PI / 180.0), sx = std::sin(x_deg * M_PI / 180.0);
    for (Vec3& v : mesh.vertices) {
        v = {cz * v.x - sz * v.y, sz * v.x + cz * v.y, v.z};
        v = {v.x, cx * v.y - sx * v.z, sx * v.y + cx * v.z};
    }
    return mesh;
}

struct NamedModel {
    std::string name;
    SegmentedMesh mesh;
    // expected B-Rep entity counts (vertices, edges, faces)
    int v = 0, e = 0, f = 0;
};

// The reconstruction suite: cubes, boxes at varied aspect ratios, an L-shaped
// extrusion, a triangular prism, a wedge, a slotted box, plus rotated copies.
inline std::vector<NamedModel> primitive_suite() {
    std::vector<NamedModel> suite;
    auto add = [&](std::string name, SegmentedMesh mesh, int v, int e, int f) {
        suite.push_back({std::move(name), std::move(mesh), v, e, f});
    };

    add("cube_unit", make_box(1.0, 1.0, 1.0), 8, 12, 6);
    add("cube_small", make_box(0.8, 0.8, 0.8), 8, 12, 6);
    add("box_a", make_box(1.0, 0.62, 0.45), 8, 12, 6);
    add("box_b", make_box(1.0, 0.84, 0.27), 8, 12, 6);
    add("box_c", make_box(0.9, 0.52, 0.7), 8, 12, 6);
    add("plate", make_box(1.0, 0.95, 0.22), 8, 12, 6);

    std::vector<std::pair<double, double>> lshape = {{0, 0},    {1, 0},    {1, 0.32},
                                                     {0.45, 0.32}, {0.45, 0.75}, {0, 0.75}};
    add("lshape", make_extrusion(lshape, 0.46), 12, 18, 8);

    std::vector<std::pair<double, double>> triangle = {{0, 0}, {1, 0}, {0.29, 0.64}};
    add("prism", make_extrusion(triangle, 0.56), 6, 9, 5);

    std::vector<std::pair<double, double>> right_tri = {{0, 0}, {1, 0}, {0, 0.58}};
    add("wedge", make_extrusion(right_tri, 0.44), 6, 9, 5);

    add("slotted_box", make_slotted_box(1.0, 0.8, 0.6, 0.3, 0.24), 16, 24, 10);

    // rotation angles chosen so every junction lands well inside its 4-bit
    // quantization bucket after normalization
    add("box_rot", rotate_mesh(make_box(1.0, 0.62, 0.45), 9.0, 39.0), 8, 12, 6);
    add("prism_rot", rotate_mesh(make_extrusion(triangle, 0.56), 24.0, 34.0), 6, 9, 5);
    add("wedge_rot", rotate_mesh(make_extrusion(right_tri, 0.44), 13.0, 29.0), 6, 9, 5);

    return suite;
}

} // namespace brdf::fixtures
