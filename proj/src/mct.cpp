#include "brdf/mct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "brdf/mc_tables.hpp"

namespace brdf {

namespace {

inline bool is_inside(float v) { return v < 0.0f; }

// Global id of the grid edge starting at node (i,j,k) along axis.
inline std::uint64_t grid_edge_key(int i, int j, int k, int axis, int r) {
    std::uint64_t node = (static_cast<std::uint64_t>(i) * r + j) * r + k;
    return node * 3 + axis;
}

void check_boundary_clear(const ScalarField3& f) {
    const int r = f.resolution;
    auto flag = [&](int i, int j, int k) {
        throw GeometryError(
            "marching_cubes: zero level set touches the domain boundary near node (" +
            std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) +
            "); encode with a margin so the surface stays interior");
    };
    // sign changes along edges lying in a boundary face open the mesh there
    for (int i : {0, r - 1})
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                if (j + 1 < r && is_inside(f.at(i, j, k)) != is_inside(f.at(i, j + 1, k))) flag(i, j, k);
                if (k + 1 < r && is_inside(f.at(i, j, k)) != is_inside(f.at(i, j, k + 1))) flag(i, j, k);
            }
    for (int j : {0, r - 1})
        for (int i = 0; i < r; ++i)
            for (int k = 0; k < r; ++k) {
                if (i + 1 < r && is_inside(f.at(i, j, k)) != is_inside(f.at(i + 1, j, k))) flag(i, j, k);
                if (k + 1 < r && is_inside(f.at(i, j, k)) != is_inside(f.at(i, j, k + 1))) flag(i, j, k);
            }
    for (int k : {0, r - 1})
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                if (i + 1 < r && is_inside(f.at(i, j, k)) != is_inside(f.at(i + 1, j, k))) flag(i, j, k);
                if (j + 1 < r && is_inside(f.at(i, j, k)) != is_inside(f.at(i, j + 1, k))) flag(i, j, k);
            }
}

// Crossing position on a grid edge; lower node first so the lerp direction is
// canonical.
Vec3 edge_vertex_position(const ScalarField3& f, std::uint64_t key) {
    int axis = static_cast<int>(key % 3);
    std::uint64_t node = key / 3;
    const int r = f.resolution;
    int k = static_cast<int>(node % r);
    int j = static_cast<int>((node / r) % r);
    int i = static_cast<int>(node / (static_cast<std::uint64_t>(r) * r));
    int i1 = i + (axis == 0), j1 = j + (axis == 1), k1 = k + (axis == 2);
    double v0 = f.at(i, j, k);
    double v1 = f.at(i1, j1, k1);
    double t = v0 / (v0 - v1);
    return lerp(f.node_position(i, j, k), f.node_position(i1, j1, k1), t);
}

struct CubeEmit {
    std::uint8_t config = 0;
    int tri_count = 0;
};

SurfaceMesh assemble_from_edge_triples(const ScalarField3& f,
                                       const std::vector<std::uint64_t>& triples) {
    SurfaceMesh mesh;
    std::unordered_map<std::uint64_t, int> vertex_of_edge;
    vertex_of_edge.reserve(triples.size());
    // the table rows wind inward for negative-inside fields; swapping the
    // last two corners makes the surface face outward
    constexpr int corner_order[3] = {0, 2, 1};
    for (std::size_t n = 0; n < triples.size(); n += 3) {
        Tri tri;
        for (int c = 0; c < 3; ++c) {
            std::uint64_t key = triples[n + corner_order[c]];
            auto [it, fresh] = vertex_of_edge.try_emplace(key, static_cast<int>(mesh.vertices.size()));
            if (fresh)
                mesh.vertices.push_back(edge_vertex_position(f, key));
            tri[c] = it->second;
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

void emit_cube_triples(const ScalarField3& f, int ci, int cj, int ck, std::uint8_t config,
                       std::uint64_t* out) {
    const int r = f.resolution;
    for (int n = 0; mc::kTriTable[config][n] != -1; ++n) {
        int e = mc::kTriTable[config][n];
        const int* c0 = mc::kCornerOffset[mc::kEdgeCorners[e][0]];
        const int* c1 = mc::kCornerOffset[mc::kEdgeCorners[e][1]];
        int axis = c0[0] != c1[0] ? 0 : (c0[1] != c1[1] ? 1 : 2);
        int i = ci + std::min(c0[0], c1[0]);
        int j = cj + std::min(c0[1], c1[1]);
        int k = ck + std::min(c0[2], c1[2]);
        out[n] = grid_edge_key(i, j, k, axis, r);
    }
}

std::uint8_t cube_config(const ScalarField3& f, int ci, int cj, int ck) {
    std::uint8_t config = 0;
    for (int c = 0; c < 8; ++c) {
        const int* off = mc::kCornerOffset[c];
        if (is_inside(f.at(ci + off[0], cj + off[1], ck + off[2])))
            config |= static_cast<std::uint8_t>(1u << c);
    }
    return config;
}

int config_tri_count(std::uint8_t config) {
    int n = 0;
    while (mc::kTriTable[config][n] != -1)
        ++n;
    return n / 3;
}

} // namespace

SurfaceMesh marching_cubes(const ScalarField3& f) {
    check_boundary_clear(f);
    const int r = f.resolution;
    const int rc = r - 1;
    const std::int64_t cubes = static_cast<std::int64_t>(rc) * rc * rc;

    std::vector<CubeEmit> emit(cubes);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < cubes; ++c) {
        int ci = static_cast<int>(c / (rc * rc));
        int cj = static_cast<int>((c / rc) % rc);
        int ck = static_cast<int>(c % rc);
        std::uint8_t config = cube_config(f, ci, cj, ck);
        emit[c].config = config;
        emit[c].tri_count = config_tri_count(config);
    }

    std::vector<std::int64_t> offset(cubes + 1, 0);
    for (std::int64_t c = 0; c < cubes; ++c)
        offset[c + 1] = offset[c] + emit[c].tri_count;

    std::vector<std::uint64_t> triples(static_cast<std::size_t>(offset[cubes]) * 3);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < cubes; ++c) {
        if (emit[c].tri_count == 0) continue;
        int ci = static_cast<int>(c / (rc * rc));
        int cj = static_cast<int>((c / rc) % rc);
        int ck = static_cast<int>(c % rc);
        emit_cube_triples(f, ci, cj, ck, emit[c].config, &triples[offset[c] * 3]);
    }

    return assemble_from_edge_triples(f, triples);
}

SurfaceMesh marching_cubes_serial(const ScalarField3& f) {
    check_boundary_clear(f);
    const int r = f.resolution;
    std::vector<std::uint64_t> triples;
    std::uint64_t scratch[15];
    for (int ci = 0; ci < r - 1; ++ci)
        for (int cj = 0; cj < r - 1; ++cj)
            for (int ck = 0; ck < r - 1; ++ck) {
                std::uint8_t config = cube_config(f, ci, cj, ck);
                int n = config_tri_count(config) * 3;
                if (n == 0) continue;
                emit_cube_triples(f, ci, cj, ck, config, scratch);
                triples.insert(triples.end(), scratch, scratch + n);
            }
    return assemble_from_edge_triples(f, triples);
}

LabeledSurfaceMesh label_vertices(const SurfaceMesh& mesh, const BrDf& brdf) {
    LabeledSurfaceMesh out;
    out.mesh = mesh;
    out.face_count = brdf.face_count();
    const int fcount = out.face_count;
    const std::int64_t nv = static_cast<std::int64_t>(mesh.vertices.size());
    out.udf_values.resize(static_cast<std::size_t>(nv) * fcount);
    out.min_face.resize(nv);

#pragma omp parallel for schedule(static)
    for (std::int64_t v = 0; v < nv; ++v) {
        const Vec3& p = mesh.vertices[v];
        int best = 0;
        double best_val = 0.0;
        for (int f = 0; f < fcount; ++f) {
            double val = brdf.udfs[f].sample(p);
            out.udf_values[v * fcount + f] = val;
            double pval = perturbed_udf(val, f);
            if (f == 0 || pval < best_val) {
                best = f;
                best_val = pval;
            }
        }
        out.min_face[v] = best;
    }
    return out;
}

double edge_crossing(double a1, double b1, double a2, double b2) {
    double d1 = a1 - b1, d2 = a2 - b2;
    if (d1 == d2 || d1 * d2 > 0.0)
        throw std::logic_error("edge_crossing: difference does not change sign along the edge");
    return d1 / (d1 - d2);
}

Vec3 interior_covertex(const std::array<double, 3>& ua, const std::array<double, 3>& ub,
                       const std::array<double, 3>& uc) {
    // Solve for alpha, beta with gamma = 1 - alpha - beta such that the
    // interpolated values of all three faces coincide.
    double d0 = ua[0] - ub[0], d1 = ua[1] - ub[1], d2 = ua[2] - ub[2];
    double e0 = ua[0] - uc[0], e1 = ua[1] - uc[1], e2 = ua[2] - uc[2];
    double m00 = d0 - d2, m01 = d1 - d2, r0 = -d2;
    double m10 = e0 - e2, m11 = e1 - e2, r1 = -e2;
    double det = m00 * m11 - m01 * m10;

    const Vec3 centroid{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    if (std::abs(det) < 1e-30)
        return centroid;
    double alpha = (r0 * m11 - m01 * r1) / det;
    double beta = (m00 * r1 - r0 * m10) / det;
    double gamma = 1.0 - alpha - beta;
    constexpr double tol = 1e-12;
    if (alpha < -tol || beta < -tol || gamma < -tol || alpha > 1.0 + tol || beta > 1.0 + tol ||
        gamma > 1.0 + tol)
        return centroid;
    return {alpha, beta, gamma};
}

namespace {

SegmentEndpoint make_crossing(const LabeledSurfaceMesh& L, int u, int v) {
    int lo = std::min(u, v), hi = std::max(u, v);
    int p = L.min_face[u], q = L.min_face[v];
    int fa = std::min(p, q), fb = std::max(p, q);
    double d_lo = perturbed_udf(L.udf(lo, fa), fa) - perturbed_udf(L.udf(lo, fb), fb);
    double d_hi = perturbed_udf(L.udf(hi, fa), fa) - perturbed_udf(L.udf(hi, fb), fb);
    double t = d_lo / (d_lo - d_hi);
    SegmentEndpoint e;
    e.kind = SegmentEndpoint::EdgeCross;
    e.key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
    e.pos = lerp(L.mesh.vertices[lo], L.mesh.vertices[hi], t);
    return e;
}

} // namespace

void triangle_rule(const LabeledSurfaceMesh& L, int tri_id, std::vector<BoundarySegment>& out) {
    const Tri& tri = L.mesh.triangles[tri_id];
    int l0 = L.min_face[tri[0]], l1 = L.min_face[tri[1]], l2 = L.min_face[tri[2]];

    if (l0 == l1 && l1 == l2)
        return;

    if (l0 != l1 && l1 != l2 && l0 != l2) {
        // one co-vertex, three incident segments
        std::array<double, 3> ua, ub, uc;
        for (int c = 0; c < 3; ++c) {
            ua[c] = perturbed_udf(L.udf(tri[c], l0), l0);
            ub[c] = perturbed_udf(L.udf(tri[c], l1), l1);
            uc[c] = perturbed_udf(L.udf(tri[c], l2), l2);
        }
        Vec3 bary = interior_covertex(ua, ub, uc);
        SegmentEndpoint center;
        center.kind = SegmentEndpoint::CoVertex;
        center.key = static_cast<std::uint64_t>(tri_id);
        center.pos = L.mesh.vertices[tri[0]] * bary.x + L.mesh.vertices[tri[1]] * bary.y +
                     L.mesh.vertices[tri[2]] * bary.z;
        for (int c = 0; c < 3; ++c) {
            int u = tri[c], v = tri[(c + 1) % 3];
            BoundarySegment seg;
            seg.fa = std::min(L.min_face[u], L.min_face[v]);
            seg.fb = std::max(L.min_face[u], L.min_face[v]);
            seg.e0 = center;
            seg.e1 = make_crossing(L, u, v);
            out.push_back(seg);
        }
        return;
    }

    // exactly two labels: one segment separating the odd vertex
    int odd = l0 != l1 ? (l0 == l2 ? 1 : (l1 == l2 ? 0 : -1)) : 2;
    int a = tri[(odd + 1) % 3], b = tri[(odd + 2) % 3], o = tri[odd];
    BoundarySegment seg;
    seg.fa = std::min(L.min_face[o], L.min_face[a]);
    seg.fb = std::max(L.min_face[o], L.min_face[a]);
    seg.e0 = make_crossing(L, a, o);
    seg.e1 = make_crossing(L, b, o);
    out.push_back(seg);
}

std::vector<BoundarySegment> collect_segments(const LabeledSurfaceMesh& L) {
    const std::int64_t nt = static_cast<std::int64_t>(L.mesh.triangles.size());
    std::vector<std::vector<BoundarySegment>> per_tri(nt);
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < nt; ++t)
        triangle_rule(L, static_cast<int>(t), per_tri[t]);

    std::vector<BoundarySegment> all;
    for (auto& segs : per_tri)
        all.insert(all.end(), segs.begin(), segs.end());
    return all;
}

namespace {

FacetedBRep assemble_impl(const LabeledSurfaceMesh& L, const std::vector<BoundarySegment>& segments,
                          MctOutput* provenance) {
    FacetedBRep b;
    b.mesh = L.mesh;

    // Faces: labels that win at least one mesh vertex. Triangles assigned by
    // majority label, ties to the smallest.
    std::map<int, FacetedBRep::Face> faces;
    for (int f : L.min_face)
        faces[f].label = f;
    for (std::size_t t = 0; t < L.mesh.triangles.size(); ++t) {
        const Tri& tri = L.mesh.triangles[t];
        int l0 = L.min_face[tri[0]], l1 = L.min_face[tri[1]], l2 = L.min_face[tri[2]];
        int label;
        if (l0 == l1 || l0 == l2)
            label = l0;
        else if (l1 == l2)
            label = l1;
        else
            label = std::min({l0, l1, l2});
        faces[label].triangles.push_back(static_cast<int>(t));
    }
    for (auto& [label, face] : faces)
        b.faces.push_back(std::move(face));

    // B-Rep vertices: co-vertex endpoints in triangle order.
    std::unordered_map<std::uint64_t, int> vertex_of_covertex;
    auto note_covertex = [&](const SegmentEndpoint& e) {
        if (e.kind != SegmentEndpoint::CoVertex) return;
        auto [it, fresh] = vertex_of_covertex.try_emplace(e.key, static_cast<int>(b.vertices.size()));
        if (fresh)
            b.vertices.push_back(e.pos);
    };
    for (const BoundarySegment& s : segments) {
        note_covertex(s.e0);
        note_covertex(s.e1);
    }

    // Group segments by face pair and chain them end to end.
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (std::size_t s = 0; s < segments.size(); ++s)
        groups[{segments[s].fa, segments[s].fb}].push_back(static_cast<int>(s));

    auto endpoint_key = [](const SegmentEndpoint& e) {
        return e.kind == SegmentEndpoint::CoVertex ? (e.key | (1ull << 63)) : e.key;
    };

    for (auto& [pair, seg_ids] : groups) {
        std::unordered_map<std::uint64_t, std::array<int, 2>> incident; // key -> up to 2 seg ids
        for (int s : seg_ids) {
            for (const SegmentEndpoint* e : {&segments[s].e0, &segments[s].e1}) {
                auto [it, fresh] = incident.try_emplace(endpoint_key(*e), std::array<int, 2>{-1, -1});
                if (it->second[0] < 0)
                    it->second[0] = s;
                else
                    it->second[1] = s;
            }
        }
        std::unordered_map<int, char> used;
        for (int s : seg_ids)
            used[s] = 0;

        auto other_end = [&](int s, std::uint64_t from_key) -> const SegmentEndpoint& {
            const BoundarySegment& seg = segments[s];
            return endpoint_key(seg.e0) == from_key ? seg.e1 : seg.e0;
        };

        auto walk = [&](int start_seg, const SegmentEndpoint& start) {
            FacetedBRep::Edge edge;
            edge.fa = pair.first;
            edge.fb = pair.second;
            std::vector<MctOutput::PointRef> refs;
            auto push_point = [&](const SegmentEndpoint& e) {
                edge.polyline.push_back(e.pos);
                refs.push_back({e.kind == SegmentEndpoint::CoVertex, e.key});
            };
            push_point(start);
            int s = start_seg;
            std::uint64_t at = endpoint_key(start);
            while (true) {
                used[s] = 1;
                const SegmentEndpoint& next = other_end(s, at);
                push_point(next);
                std::uint64_t nkey = endpoint_key(next);
                if (next.kind == SegmentEndpoint::CoVertex || nkey == endpoint_key(start))
                    break;
                const auto& inc = incident[nkey];
                int follow = inc[0] == s ? inc[1] : inc[0];
                if (follow < 0 || used[follow])
                    break;
                s = follow;
                at = nkey;
            }
            return std::make_pair(edge, refs);
        };

        // open chains start at co-vertex endpoints
        for (int s : seg_ids) {
            if (used[s]) continue;
            const SegmentEndpoint* start = nullptr;
            if (segments[s].e0.kind == SegmentEndpoint::CoVertex)
                start = &segments[s].e0;
            else if (segments[s].e1.kind == SegmentEndpoint::CoVertex)
                start = &segments[s].e1;
            if (!start) continue;
            auto [edge, refs] = walk(s, *start);
            edge.closed = false;
            edge.v0 = vertex_of_covertex.at(refs.front().key);
            edge.v1 = vertex_of_covertex.at(refs.back().key);
            b.edges.push_back(std::move(edge));
            if (provenance)
                provenance->edge_points.push_back(std::move(refs));
        }
        // leftovers are closed loops of edge crossings
        for (int s : seg_ids) {
            if (used[s]) continue;
            auto [edge, refs] = walk(s, segments[s].e0);
            edge.closed = true;
            edge.polyline.pop_back(); // drop repeated start point
            refs.pop_back();
            b.edges.push_back(std::move(edge));
            if (provenance)
                provenance->edge_points.push_back(std::move(refs));
        }
    }
    return b;
}

} // namespace

FacetedBRep assemble_brep(const LabeledSurfaceMesh& labeled,
                          const std::vector<BoundarySegment>& segments) {
    return assemble_impl(labeled, segments, nullptr);
}

MctOutput run_mct(const BrDf& brdf) {
    MctOutput out;
    SurfaceMesh mesh = marching_cubes(brdf.sdf);
    out.labeled = label_vertices(mesh, brdf);
    out.segments = collect_segments(out.labeled);
    out.brep = assemble_impl(out.labeled, out.segments, &out);
    return out;
}

} // namespace brdf
