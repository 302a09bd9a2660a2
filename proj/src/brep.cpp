#include "brdf/brep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace brdf {

WatertightReport check_watertight(const SurfaceMesh& mesh) {
    WatertightReport report;
    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(mesh.triangles.size() * 3);
    std::vector<char> referenced(mesh.vertices.size(), 0);
    for (const Tri& t : mesh.triangles) {
        for (int c = 0; c < 3; ++c) {
            referenced[t[c]] = 1;
            std::uint64_t a = t[c], b = t[(c + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_count[(a << 32) | b] += 1;
        }
    }
    for (const auto& [key, count] : edge_count) {
        int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
        if (count == 1)
            report.boundary_edges.emplace_back(a, b);
        else if (count > 2)
            report.overshared_edges.emplace_back(a, b);
    }
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        if (!referenced[v])
            report.isolated_vertices.push_back(static_cast<int>(v));
    report.watertight = !mesh.triangles.empty() && report.boundary_edges.empty() &&
                        report.overshared_edges.empty() && report.isolated_vertices.empty();
    return report;
}

TopologyReport validate_topology(const FacetedBRep& b) {
    TopologyReport report;
    auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };

    std::set<int> labels;
    for (const auto& f : b.faces) {
        if (!labels.insert(f.label).second)
            fail("duplicate face label " + std::to_string(f.label));
    }

    for (std::size_t e = 0; e < b.edges.size(); ++e) {
        const auto& edge = b.edges[e];
        if (edge.fa == edge.fb)
            fail("edge " + std::to_string(e) + ": face_pair members equal (" +
                 std::to_string(edge.fa) + ")");
        if (!labels.count(edge.fa) || !labels.count(edge.fb))
            fail("edge " + std::to_string(e) + ": face_pair references missing face");
        if (edge.closed) {
            if (edge.v0 != -1 || edge.v1 != -1)
                fail("edge " + std::to_string(e) + ": closed edge references vertices");
            if (edge.polyline.size() < 3)
                fail("edge " + std::to_string(e) + ": closed polyline too short");
        } else {
            if (edge.v0 < 0 || edge.v0 >= static_cast<int>(b.vertices.size()) || edge.v1 < 0 ||
                edge.v1 >= static_cast<int>(b.vertices.size()))
                fail("edge " + std::to_string(e) + ": open edge vertex ids out of range");
            if (edge.polyline.size() < 2)
                fail("edge " + std::to_string(e) + ": open polyline too short");
        }
    }

    std::vector<int> incidence(b.vertices.size(), 0);
    for (const auto& edge : b.edges) {
        if (edge.closed) continue;
        if (edge.v0 >= 0 && edge.v0 < static_cast<int>(b.vertices.size())) incidence[edge.v0]++;
        if (edge.v1 >= 0 && edge.v1 < static_cast<int>(b.vertices.size())) incidence[edge.v1]++;
    }
    for (std::size_t v = 0; v < b.vertices.size(); ++v)
        if (incidence[v] < 3)
            fail("vertex " + std::to_string(v) + ": incident to " + std::to_string(incidence[v]) +
                 " edge endpoints (< 3)");

    std::vector<int> covered(b.mesh.triangles.size(), 0);
    for (const auto& f : b.faces)
        for (int t : f.triangles) {
            if (t < 0 || t >= static_cast<int>(covered.size()))
                fail("face " + std::to_string(f.label) + ": triangle id out of range");
            else
                covered[t]++;
        }
    for (std::size_t t = 0; t < covered.size(); ++t)
        if (covered[t] != 1)
            fail("triangle " + std::to_string(t) + ": covered " + std::to_string(covered[t]) +
                 " times by faces");

    return report;
}

int quantize_coord(double x) {
    int q = static_cast<int>(std::floor((x + 1.0) * 0.5 * 16.0));
    return std::clamp(q, 0, 15);
}

namespace {

std::array<int, 3> quantize(const Vec3& p) {
    return {quantize_coord(p.x), quantize_coord(p.y), quantize_coord(p.z)};
}

Vec3 loop_sample(const std::vector<Vec3>& polyline) {
    // lexicographically smallest point stands in for both endpoints
    const Vec3* best = &polyline[0];
    for (const Vec3& p : polyline) {
        if (p.x < best->x || (p.x == best->x && (p.y < best->y || (p.y == best->y && p.z < best->z))))
            best = &p;
    }
    return *best;
}

} // namespace

TopologySignature topology_signature(const FacetedBRep& b) {
    TopologySignature sig;
    sig.v_count = static_cast<int>(b.vertices.size());
    sig.e_count = static_cast<int>(b.edges.size());
    sig.f_count = static_cast<int>(b.faces.size());

    for (const Vec3& v : b.vertices)
        sig.qverts.push_back(quantize(v));
    std::sort(sig.qverts.begin(), sig.qverts.end());

    for (const auto& edge : b.edges) {
        TopologySignature::EdgeRec rec;
        rec.closed = edge.closed;
        rec.fa = edge.fa;
        rec.fb = edge.fb;
        if (edge.closed) {
            rec.qa = rec.qb = quantize(loop_sample(edge.polyline));
        } else {
            rec.qa = quantize(b.vertices[edge.v0]);
            rec.qb = quantize(b.vertices[edge.v1]);
            if (rec.qb < rec.qa) std::swap(rec.qa, rec.qb);
        }
        sig.edges.push_back(rec);
    }

    for (const auto& f : b.faces)
        sig.face_labels.push_back(f.label);
    std::sort(sig.face_labels.begin(), sig.face_labels.end());
    return sig;
}

namespace {

// Geometric key of one edge record, face labels excluded.
using EdgeGeom = std::tuple<bool, std::array<int, 3>, std::array<int, 3>>;

EdgeGeom edge_geom(const TopologySignature::EdgeRec& r) {
    return {r.closed, r.qa, r.qb};
}

// Per face label: sorted multiset of incident edge geometries.
std::map<int, std::vector<EdgeGeom>> face_keys(const TopologySignature& s) {
    std::map<int, std::vector<EdgeGeom>> keys;
    for (int label : s.face_labels)
        keys[label]; // faces with no edges get an empty key
    for (const auto& r : s.edges) {
        keys[r.fa].push_back(edge_geom(r));
        keys[r.fb].push_back(edge_geom(r));
    }
    for (auto& [label, k] : keys)
        std::sort(k.begin(), k.end());
    return keys;
}

using CanonicalRecord = std::tuple<int, int, bool, std::array<int, 3>, std::array<int, 3>>;

std::vector<CanonicalRecord> canonical_records(const TopologySignature& s,
                                               const std::map<int, int>& rank) {
    std::vector<CanonicalRecord> recs;
    recs.reserve(s.edges.size());
    for (const auto& r : s.edges) {
        int ra = rank.at(r.fa), rb = rank.at(r.fb);
        if (ra > rb) std::swap(ra, rb);
        recs.emplace_back(ra, rb, r.closed, r.qa, r.qb);
    }
    std::sort(recs.begin(), recs.end());
    return recs;
}

} // namespace

TopologyMatch compare_topology(const TopologySignature& a, const TopologySignature& b) {
    if (a.v_count != b.v_count || a.e_count != b.e_count || a.f_count != b.f_count)
        return TopologyMatch::Different;
    if (a.qverts != b.qverts)
        return TopologyMatch::Different;

    auto keys_a = face_keys(a);
    auto keys_b = face_keys(b);

    // Order faces by geometric key; equal keys form symmetry classes.
    std::vector<std::pair<std::vector<EdgeGeom>, int>> fa, fb;
    for (auto& [label, k] : keys_a) fa.emplace_back(k, label);
    for (auto& [label, k] : keys_b) fb.emplace_back(k, label);
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    for (std::size_t i = 0; i < fa.size(); ++i)
        if (fa[i].first != fb[i].first)
            return TopologyMatch::Different;

    std::map<int, int> rank_b;
    for (std::size_t i = 0; i < fb.size(); ++i)
        rank_b[fb[i].second] = static_cast<int>(i);
    auto target = canonical_records(b, rank_b);

    // Identify tie classes in a (ranges of equal keys).
    std::vector<std::pair<int, int>> classes;
    std::size_t i = 0;
    std::uint64_t permutations = 1;
    while (i < fa.size()) {
        std::size_t j = i;
        while (j < fa.size() && fa[j].first == fa[i].first) ++j;
        classes.emplace_back(static_cast<int>(i), static_cast<int>(j));
        for (std::size_t n = 2; n <= j - i; ++n) {
            permutations *= n;
            if (permutations > 40320) break;
        }
        i = j;
    }

    std::map<int, int> rank_a;
    for (std::size_t p = 0; p < fa.size(); ++p)
        rank_a[fa[p].second] = static_cast<int>(p);
    if (canonical_records(a, rank_a) == target)
        return TopologyMatch::Same;

    bool has_ties = false;
    for (auto& [lo, hi] : classes)
        if (hi - lo > 1) has_ties = true;
    if (!has_ties)
        return TopologyMatch::Different;
    if (a.f_count > 12 || permutations > 40320)
        return TopologyMatch::Indeterminate;

    // Exhaust relabelings within tie classes.
    std::vector<std::vector<int>> perms(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        perms[c].resize(classes[c].second - classes[c].first);
        std::iota(perms[c].begin(), perms[c].end(), classes[c].first);
    }
    // iterate over the cartesian product of per-class permutations
    std::vector<std::vector<std::vector<int>>> all(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<int> p = perms[c];
        do {
            all[c].push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    std::vector<std::size_t> pick(classes.size(), 0);
    while (true) {
        std::map<int, int> rank;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const auto& p = all[c][pick[c]];
            for (std::size_t k = 0; k < p.size(); ++k)
                rank[fa[classes[c].first + k].second] = p[k];
        }
        if (canonical_records(a, rank) == target)
            return TopologyMatch::Same;
        std::size_t c = 0;
        for (; c < classes.size(); ++c) {
            if (++pick[c] < all[c].size()) break;
            pick[c] = 0;
        }
        if (c == classes.size()) break;
    }
    return TopologyMatch::Different;
}

MeshTopology derive_topology(const SegmentedMesh& mesh) {
    if (!mesh.is_watertight())
        throw GeometryError("derive_topology: mesh is not watertight");

    // Boundary mesh edges: the two incident triangles carry different labels.
    struct BEdge {
        int a, b;   // vertex ids, a < b
        int fa, fb; // labels, fa < fb
    };
    std::unordered_map<std::uint64_t, std::pair<int, int>> edge_labels; // key -> 2 labels
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Tri& tri = mesh.triangles[t];
        for (int c = 0; c < 3; ++c) {
            std::uint64_t a = tri[c], b = tri[(c + 1) % 3];
            if (a > b) std::swap(a, b);
            std::uint64_t key = (a << 32) | b;
            auto it = edge_labels.find(key);
            if (it == edge_labels.end())
                edge_labels[key] = {mesh.labels[t], -1};
            else
                it->second.second = mesh.labels[t];
        }
    }

    std::vector<BEdge> boundary;
    for (const auto& [key, labels] : edge_labels) {
        if (labels.first != labels.second && labels.second != -1) {
            BEdge e;
            e.a = static_cast<int>(key >> 32);
            e.b = static_cast<int>(key & 0xffffffffu);
            e.fa = std::min(labels.first, labels.second);
            e.fb = std::max(labels.first, labels.second);
            boundary.push_back(e);
        }
    }
    std::sort(boundary.begin(), boundary.end(), [](const BEdge& l, const BEdge& r) {
        return std::tie(l.fa, l.fb, l.a, l.b) < std::tie(r.fa, r.fb, r.a, r.b);
    });

    MeshTopology topo;
    topo.vclass.assign(mesh.vertices.size(), MeshTopology::VertexClass::Interior);

    // Distinct labels and boundary-edge degree per vertex.
    std::vector<std::set<int>> vertex_labels(mesh.vertices.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int c = 0; c < 3; ++c)
            vertex_labels[mesh.triangles[t][c]].insert(mesh.labels[t]);
    std::vector<int> bdegree(mesh.vertices.size(), 0);
    for (const BEdge& e : boundary) {
        bdegree[e.a]++;
        bdegree[e.b]++;
    }

    std::vector<int> junction_id(mesh.vertices.size(), -1);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        if (bdegree[v] == 0) continue;
        if (vertex_labels[v].size() >= 3 || bdegree[v] != 2) {
            topo.vclass[v] = MeshTopology::VertexClass::Junction;
            junction_id[v] = static_cast<int>(topo.junctions.size());
            topo.junctions.push_back(static_cast<int>(v));
        } else {
            topo.vclass[v] = MeshTopology::VertexClass::Boundary;
        }
    }

    // Chain boundary edges per face pair.
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (std::size_t e = 0; e < boundary.size(); ++e)
        groups[{boundary[e].fa, boundary[e].fb}].push_back(static_cast<int>(e));

    for (auto& [pair, edge_ids] : groups) {
        std::unordered_map<int, std::vector<int>> at_vertex;
        for (int e : edge_ids) {
            at_vertex[boundary[e].a].push_back(e);
            at_vertex[boundary[e].b].push_back(e);
        }
        std::vector<char> used(edge_ids.size(), 0);
        std::unordered_map<int, int> local; // edge id -> position in edge_ids
        for (std::size_t p = 0; p < edge_ids.size(); ++p)
            local[edge_ids[p]] = static_cast<int>(p);

        auto walk = [&](int start_edge, int start_vertex) {
            MeshTopology::Chain chain;
            chain.fa = pair.first;
            chain.fb = pair.second;
            chain.verts.push_back(start_vertex);
            int e = start_edge, v = start_vertex;
            while (true) {
                used[local[e]] = 1;
                int next = boundary[e].a == v ? boundary[e].b : boundary[e].a;
                chain.verts.push_back(next);
                if (topo.vclass[next] == MeshTopology::VertexClass::Junction || next == start_vertex)
                    break;
                int follow = -1;
                for (int cand : at_vertex[next])
                    if (!used[local[cand]]) { follow = cand; break; }
                if (follow < 0) break;
                e = follow;
                v = next;
            }
            return chain;
        };

        // open chains start at junction vertices
        for (int e : edge_ids) {
            if (used[local[e]]) continue;
            int a = boundary[e].a, b = boundary[e].b;
            int start = -1;
            if (topo.vclass[a] == MeshTopology::VertexClass::Junction)
                start = a;
            else if (topo.vclass[b] == MeshTopology::VertexClass::Junction)
                start = b;
            if (start < 0) continue;
            MeshTopology::Chain chain = walk(e, start);
            chain.closed = false;
            chain.v0 = junction_id[chain.verts.front()];
            chain.v1 = junction_id[chain.verts.back()];
            topo.chains.push_back(std::move(chain));
        }
        // remaining edges form closed loops
        for (int e : edge_ids) {
            if (used[local[e]]) continue;
            MeshTopology::Chain chain = walk(e, boundary[e].a);
            chain.closed = true;
            chain.verts.pop_back(); // drop repeated start vertex
            topo.chains.push_back(std::move(chain));
        }
    }
    return topo;
}

FacetedBRep to_faceted_brep(const SegmentedMesh& mesh, const MeshTopology& topo) {
    FacetedBRep b;
    b.mesh = mesh.surface();
    for (int v : topo.junctions)
        b.vertices.push_back(mesh.vertices[v]);
    for (const auto& chain : topo.chains) {
        FacetedBRep::Edge e;
        e.fa = chain.fa;
        e.fb = chain.fb;
        e.closed = chain.closed;
        e.v0 = chain.v0;
        e.v1 = chain.v1;
        for (int v : chain.verts)
            e.polyline.push_back(mesh.vertices[v]);
        b.edges.push_back(std::move(e));
    }
    std::map<int, FacetedBRep::Face> faces;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        auto& f = faces[mesh.labels[t]];
        f.label = mesh.labels[t];
        f.triangles.push_back(static_cast<int>(t));
    }
    for (auto& [label, f] : faces)
        b.faces.push_back(std::move(f));
    return b;
}

} // namespace brdf
