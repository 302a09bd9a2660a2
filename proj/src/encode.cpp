#include "brdf/encode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace brdf {

namespace {

struct Box {
    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    Vec3 hi{-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
            -std::numeric_limits<double>::max()};
    void grow(const Vec3& p) { lo = min(lo, p); hi = max(hi, p); }
    void grow(const Box& b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }
};

double box_distance2(const Vec3& p, const Vec3& lo, const Vec3& hi) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        double d = std::max({lo[a] - p[a], 0.0, p[a] - hi[a]});
        d2 += d * d;
    }
    return d2;
}

bool ray_hits_box(const Vec3& p, const Vec3& inv_dir, const Vec3& lo, const Vec3& hi) {
    double tmin = 0.0, tmax = std::numeric_limits<double>::max();
    for (int a = 0; a < 3; ++a) {
        double t0 = (lo[a] - p[a]) * inv_dir[a];
        double t1 = (hi[a] - p[a]) * inv_dir[a];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return false;
    }
    return true;
}

// Moller-Trumbore; counts a crossing for t > eps only.
bool ray_crosses_triangle(const Vec3& p, const Vec3& dir, const Vec3& a, const Vec3& b,
                          const Vec3& c) {
    constexpr double eps = 1e-14;
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 h = cross(dir, e2);
    double det = dot(e1, h);
    if (std::abs(det) < eps) return false;
    double inv = 1.0 / det;
    Vec3 s = p - a;
    double u = dot(s, h) * inv;
    if (u < 0.0 || u > 1.0) return false;
    Vec3 q = cross(s, e1);
    double v = dot(dir, q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    double t = dot(e2, q) * inv;
    return t > eps;
}

} // namespace

TriangleBvh::TriangleBvh(const std::vector<Vec3>& vertices, const std::vector<Tri>& triangles,
                         std::vector<int> subset)
    : vertices_(&vertices), triangles_(&triangles) {
    if (subset.empty()) return;
    nodes_.reserve(subset.size() * 2);
    build(subset, 0, static_cast<int>(subset.size()));
    tri_ids_ = std::move(subset);
}

int TriangleBvh::build(std::vector<int>& ids, int begin, int end) {
    Node node;
    Box box;
    for (int i = begin; i < end; ++i) {
        const Tri& t = (*triangles_)[ids[i]];
        box.grow((*vertices_)[t[0]]);
        box.grow((*vertices_)[t[1]]);
        box.grow((*vertices_)[t[2]]);
    }
    node.lo = box.lo;
    node.hi = box.hi;
    int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    int count = end - begin;
    if (count <= 4) {
        nodes_[idx].first = begin;
        nodes_[idx].count = count;
        return idx;
    }

    Vec3 extent = box.hi - box.lo;
    int axis = 0;
    if (extent.y > extent.x) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    int mid = begin + count / 2;
    std::nth_element(ids.begin() + begin, ids.begin() + mid, ids.begin() + end,
                     [&](int lhs, int rhs) {
                         const Tri& lt = (*triangles_)[lhs];
                         const Tri& rt = (*triangles_)[rhs];
                         double lc = (*vertices_)[lt[0]][axis] + (*vertices_)[lt[1]][axis] +
                                     (*vertices_)[lt[2]][axis];
                         double rc = (*vertices_)[rt[0]][axis] + (*vertices_)[rt[1]][axis] +
                                     (*vertices_)[rt[2]][axis];
                         return lc < rc;
                     });
    nodes_[idx].left = build(ids, begin, mid);
    nodes_[idx].right = build(ids, mid, end);
    return idx;
}

double TriangleBvh::distance(const Vec3& p) const {
    if (nodes_.empty())
        return std::numeric_limits<double>::max();
    double best2 = std::numeric_limits<double>::max();
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[stack[--top]];
        if (box_distance2(p, n.lo, n.hi) >= best2) continue;
        if (n.left < 0) {
            for (int i = n.first; i < n.first + n.count; ++i) {
                const Tri& t = (*triangles_)[tri_ids_[i]];
                Vec3 cp = closest_point_on_triangle(p, (*vertices_)[t[0]], (*vertices_)[t[1]],
                                                    (*vertices_)[t[2]]);
                best2 = std::min(best2, norm2(cp - p));
            }
        } else {
            // visit the nearer child first
            double dl = box_distance2(p, nodes_[n.left].lo, nodes_[n.left].hi);
            double dr = box_distance2(p, nodes_[n.right].lo, nodes_[n.right].hi);
            if (dl < dr) {
                stack[top++] = n.right;
                stack[top++] = n.left;
            } else {
                stack[top++] = n.left;
                stack[top++] = n.right;
            }
        }
    }
    return std::sqrt(best2);
}

int TriangleBvh::count_crossings(const Vec3& p, const Vec3& dir) const {
    if (nodes_.empty()) return 0;
    Vec3 inv{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    int count = 0;
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[stack[--top]];
        if (!ray_hits_box(p, inv, n.lo, n.hi)) continue;
        if (n.left < 0) {
            for (int i = n.first; i < n.first + n.count; ++i) {
                const Tri& t = (*triangles_)[tri_ids_[i]];
                if (ray_crosses_triangle(p, dir, (*vertices_)[t[0]], (*vertices_)[t[1]],
                                         (*vertices_)[t[2]]))
                    ++count;
            }
        } else {
            stack[top++] = n.left;
            stack[top++] = n.right;
        }
    }
    return count;
}

MeshDistanceIndex::MeshDistanceIndex(const SegmentedMesh& mesh) : mesh_(mesh) {
    mesh.validate();
    watertight_ = mesh.is_watertight();

    std::vector<int> all_ids(mesh.triangles.size());
    std::iota(all_ids.begin(), all_ids.end(), 0);
    all_ = TriangleBvh(mesh.vertices, mesh.triangles, std::move(all_ids));

    std::vector<std::vector<int>> per_face(mesh.face_count);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        per_face[mesh.labels[t]].push_back(static_cast<int>(t));
    face_trees_.reserve(mesh.face_count);
    for (int f = 0; f < mesh.face_count; ++f)
        face_trees_.emplace_back(mesh.vertices, mesh.triangles, std::move(per_face[f]));
}

double MeshDistanceIndex::unsigned_distance(const Vec3& p) const {
    return all_.distance(p);
}

double MeshDistanceIndex::unsigned_distance_to_face(int face_id, const Vec3& p) const {
    if (face_id < 0 || face_id >= face_count())
        throw GeometryError("unsigned_distance_to_face: invalid face id " + std::to_string(face_id));
    return face_trees_[face_id].distance(p);
}

double MeshDistanceIndex::signed_distance(const Vec3& p) const {
    if (!watertight_)
        throw GeometryError("signed_distance: mesh is not watertight, sign undefined");
    double d = all_.distance(p);

    // axis rays carry a tiny skew so they cannot run through shared edges or
    // face diagonals of axis-aligned geometry
    static const Vec3 axis_rays[3] = {
        normalize(Vec3{1.0, 1.31e-7, 2.97e-7}),
        normalize(Vec3{2.13e-7, 1.0, 1.51e-7}),
        normalize(Vec3{3.7e-8, 2.41e-7, 1.0}),
    };
    int inside_votes = 0;
    for (const Vec3& dir : axis_rays)
        inside_votes += all_.count_crossings(p, dir) & 1;

    bool inside;
    if (inside_votes == 0 || inside_votes == 3) {
        inside = inside_votes == 3;
    } else {
        // axis rays disagree; a skewed ray avoids shared-edge double hits
        static const Vec3 diag = normalize(Vec3{0.324971, 0.758976, 0.564123});
        int diag_inside = all_.count_crossings(p, diag) & 1;
        inside_votes += diag_inside;
        inside = inside_votes > 2 || (inside_votes == 2 && diag_inside == 1);
    }
    return inside ? -d : d;
}

namespace {

BrDf encode_impl(const SegmentedMesh& mesh, int resolution, double truncation, bool parallel) {
    if (resolution < 2)
        throw GeometryError("encode_brdf: resolution must be >= 2");
    if (truncation <= 0.0)
        throw GeometryError("encode_brdf: truncation must be positive");

    MeshDistanceIndex index(mesh);
    if (!index.watertight())
        throw GeometryError("encode_brdf: mesh is not watertight");

    auto [lo, hi] = mesh.bbox();
    NormalizeTransform transform = make_transform(lo, hi);

    BrDf out;
    out.sdf = ScalarField3(resolution, truncation, transform);
    out.udfs.assign(mesh.face_count, ScalarField3(resolution, truncation, transform));

    const int r = resolution;
    const std::int64_t total = static_cast<std::int64_t>(r) * r * r;
    const double tau = truncation;

#pragma omp parallel for schedule(dynamic, 256) if (parallel)
    for (std::int64_t n = 0; n < total; ++n) {
        int i = static_cast<int>(n / (r * r));
        int j = static_cast<int>((n / r) % r);
        int k = static_cast<int>(n % r);
        Vec3 world = transform.to_world(out.sdf.node_position(i, j, k));

        double s = index.signed_distance(world) * transform.scale;
        out.sdf.values[n] = static_cast<float>(std::clamp(s, -tau, tau));
        for (int f = 0; f < mesh.face_count; ++f) {
            double u = index.unsigned_distance_to_face(f, world) * transform.scale;
            out.udfs[f].values[n] = static_cast<float>(std::min(u, tau));
        }
    }
    return out;
}

} // namespace

BrDf encode_brdf(const SegmentedMesh& mesh, int resolution, double truncation) {
    return encode_impl(mesh, resolution, truncation, true);
}

BrDf encode_brdf_serial(const SegmentedMesh& mesh, int resolution, double truncation) {
    return encode_impl(mesh, resolution, truncation, false);
}

} // namespace brdf
