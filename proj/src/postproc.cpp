#include "brdf/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <unordered_set>

namespace brdf {

namespace {

// Gaussian elimination with partial pivoting for the small normal systems.
bool solve_dense(std::vector<double>& a, std::vector<double>& rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col]))
                pivot = row;
        if (std::abs(a[pivot * n + col]) < 1e-300)
            return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(rhs[col], rhs[pivot]);
        }
        for (int row = col + 1; row < n; ++row) {
            double f = a[row * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c)
                a[row * n + c] -= f * a[col * n + c];
            rhs[row] -= f * rhs[col];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double s = rhs[row];
        for (int c = row + 1; c < n; ++c)
            s -= a[row * n + c] * rhs[c];
        rhs[row] = s / a[row * n + row];
    }
    return true;
}

// Weighted polynomial fit of one coordinate; returns degree+1 coefficients.
std::vector<double> fit_poly(const std::vector<double>& s, const std::vector<double>& y,
                             const std::vector<double>& w, int degree) {
    int n = degree + 1;
    std::vector<double> ata(n * n, 0.0), atb(n, 0.0);
    for (std::size_t p = 0; p < s.size(); ++p) {
        double basis[4] = {1.0, s[p], s[p] * s[p], s[p] * s[p] * s[p]};
        for (int r = 0; r < n; ++r) {
            atb[r] += w[p] * basis[r] * y[p];
            for (int c = 0; c < n; ++c)
                ata[r * n + c] += w[p] * basis[r] * basis[c];
        }
    }
    for (int r = 0; r < n; ++r)
        ata[r * n + r] += 1e-12; // keeps short cubics solvable
    solve_dense(ata, atb, n);
    return atb;
}

double eval_poly(const std::vector<double>& coeffs, double s) {
    double acc = 0.0, pw = 1.0;
    for (double c : coeffs) {
        acc += c * pw;
        pw *= s;
    }
    return acc;
}

} // namespace

std::vector<Vec3> fit_boundary(const std::vector<Vec3>& polyline, double endpoint_weight,
                               double rho) {
    const std::size_t n = polyline.size();
    if (n < 2)
        throw GeometryError("fit_boundary: polyline needs at least 2 points");

    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        s[i] = s[i - 1] + norm(polyline[i] - polyline[i - 1]);
    double total = s.back();
    if (total <= 0.0)
        return polyline;
    for (double& v : s)
        v /= total;

    std::vector<double> w(n, 1.0);
    w.front() = endpoint_weight;
    w.back() = endpoint_weight;

    auto fit_all = [&](int degree) {
        std::array<std::vector<double>, 3> coeffs;
        for (int axis = 0; axis < 3; ++axis) {
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i)
                y[i] = polyline[i][axis];
            coeffs[axis] = fit_poly(s, y, w, degree);
        }
        return coeffs;
    };
    auto resample = [&](const std::array<std::vector<double>, 3>& coeffs) {
        std::vector<Vec3> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = {eval_poly(coeffs[0], s[i]), eval_poly(coeffs[1], s[i]),
                      eval_poly(coeffs[2], s[i])};
        return out;
    };

    auto linear = resample(fit_all(1));
    double max_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_residual = std::max(max_residual, norm(linear[i] - polyline[i]));
    if (max_residual < rho || n < 4)
        return linear;
    return resample(fit_all(3));
}

SegmentedMesh embed_boundaries(const LabeledSurfaceMesh& L,
                               const std::unordered_map<std::uint64_t, Vec3>& crossing_pos,
                               const std::unordered_map<std::uint64_t, Vec3>& covertex_pos) {
    SegmentedMesh out;
    out.vertices = L.mesh.vertices;
    out.face_count = L.face_count;

    std::unordered_map<std::uint64_t, int> crossing_vertex;
    crossing_vertex.reserve(crossing_pos.size());
    auto vertex_on_edge = [&](int u, int v) {
        std::uint64_t lo = std::min(u, v), hi = std::max(u, v);
        std::uint64_t key = (lo << 32) | hi;
        auto it = crossing_vertex.find(key);
        if (it != crossing_vertex.end())
            return it->second;
        int id = static_cast<int>(out.vertices.size());
        out.vertices.push_back(crossing_pos.at(key));
        crossing_vertex.emplace(key, id);
        return id;
    };
    auto add = [&](int a, int b, int c, int label) {
        out.triangles.push_back({a, b, c});
        out.labels.push_back(label);
    };

    for (std::size_t t = 0; t < L.mesh.triangles.size(); ++t) {
        const Tri& tri = L.mesh.triangles[t];
        int l0 = L.min_face[tri[0]], l1 = L.min_face[tri[1]], l2 = L.min_face[tri[2]];

        if (l0 == l1 && l1 == l2) {
            add(tri[0], tri[1], tri[2], l0);
            continue;
        }

        if (l0 != l1 && l1 != l2 && l0 != l2) {
            // fan around the interior co-vertex: 6 labeled wedges
            int x = static_cast<int>(out.vertices.size());
            out.vertices.push_back(covertex_pos.at(static_cast<std::uint64_t>(t)));
            int c01 = vertex_on_edge(tri[0], tri[1]);
            int c12 = vertex_on_edge(tri[1], tri[2]);
            int c20 = vertex_on_edge(tri[2], tri[0]);
            add(tri[0], c01, x, l0);
            add(c01, tri[1], x, l1);
            add(tri[1], c12, x, l1);
            add(c12, tri[2], x, l2);
            add(tri[2], c20, x, l2);
            add(c20, tri[0], x, l0);
            continue;
        }

        // two labels: rotate so the odd vertex sits last
        int odd = l0 != l1 ? (l0 == l2 ? 1 : (l1 == l2 ? 0 : -1)) : 2;
        int a = tri[(odd + 1) % 3], b = tri[(odd + 2) % 3], o = tri[odd];
        int la = L.min_face[a], lo_label = L.min_face[o];
        int cbo = vertex_on_edge(b, o);
        int coa = vertex_on_edge(o, a);
        add(a, b, cbo, la);
        add(a, cbo, coa, la);
        add(coa, cbo, o, lo_label);
    }
    return out;
}

namespace {

SegmentedMesh smooth_impl(const SegmentedMesh& mesh, const MeshTopology& topo, int iterations,
                          double damping, bool parallel) {
    SegmentedMesh out = mesh;
    if (iterations <= 0)
        return out;

    const std::int64_t nv = static_cast<std::int64_t>(mesh.vertices.size());

    // undirected 1-ring adjacency
    std::vector<std::vector<int>> neighbors(nv);
    for (const Tri& t : mesh.triangles)
        for (int c = 0; c < 3; ++c) {
            int u = t[c], v = t[(c + 1) % 3];
            neighbors[u].push_back(v);
            neighbors[v].push_back(u);
        }
    for (auto& nb : neighbors) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    // boundary vertices move only along their polyline
    std::vector<std::array<int, 2>> line_nb(nv, {-1, -1});
    for (const auto& chain : topo.chains) {
        const auto& verts = chain.verts;
        const std::size_t m = verts.size();
        for (std::size_t i = 0; i < m; ++i) {
            int v = verts[i];
            if (topo.vclass[v] != MeshTopology::VertexClass::Boundary)
                continue;
            int prev, next;
            if (chain.closed) {
                prev = verts[(i + m - 1) % m];
                next = verts[(i + 1) % m];
            } else {
                if (i == 0 || i + 1 == m) continue;
                prev = verts[i - 1];
                next = verts[i + 1];
            }
            line_nb[v] = {prev, next};
        }
    }

    std::vector<Vec3> cur = out.vertices, next(nv);
    for (int iter = 0; iter < iterations; ++iter) {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::int64_t v = 0; v < nv; ++v) {
            switch (topo.vclass[v]) {
            case MeshTopology::VertexClass::Junction:
                next[v] = cur[v];
                break;
            case MeshTopology::VertexClass::Boundary: {
                if (line_nb[v][0] < 0) {
                    next[v] = cur[v];
                    break;
                }
                Vec3 avg = (cur[line_nb[v][0]] + cur[line_nb[v][1]]) * 0.5;
                next[v] = cur[v] + (avg - cur[v]) * damping;
                break;
            }
            case MeshTopology::VertexClass::Interior: {
                const auto& nb = neighbors[v];
                if (nb.empty()) {
                    next[v] = cur[v];
                    break;
                }
                Vec3 avg{0, 0, 0};
                for (int u : nb)
                    avg += cur[u];
                avg = avg / static_cast<double>(nb.size());
                next[v] = cur[v] + (avg - cur[v]) * damping;
                break;
            }
            }
        }
        std::swap(cur, next);
    }
    out.vertices = std::move(cur);
    return out;
}

} // namespace

SegmentedMesh smooth(const SegmentedMesh& mesh, const MeshTopology& topo, int iterations,
                     double damping) {
    return smooth_impl(mesh, topo, iterations, damping, true);
}

SegmentedMesh smooth_serial(const SegmentedMesh& mesh, const MeshTopology& topo, int iterations,
                            double damping) {
    return smooth_impl(mesh, topo, iterations, damping, false);
}

namespace {

// Symmetric 4x4 plane quadric, upper triangle.
struct Quadric {
    double q[10] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0};

    void add_plane(const Vec3& n, double d, double weight) {
        const double v[4] = {n.x, n.y, n.z, d};
        int idx = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = r; c < 4; ++c)
                q[idx++] += weight * v[r] * v[c];
    }
    Quadric& operator+=(const Quadric& o) {
        for (int i = 0; i < 10; ++i)
            q[i] += o.q[i];
        return *this;
    }
    double evaluate(const Vec3& p) const {
        const double v[4] = {p.x, p.y, p.z, 1.0};
        double acc = 0.0;
        int idx = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = r; c < 4; ++c) {
                double term = q[idx++] * v[r] * v[c];
                acc += r == c ? term : 2.0 * term;
            }
        return acc;
    }
    // Minimizer of the quadric; false when the 3x3 block is near-singular.
    bool optimum(Vec3& out) const {
        double a00 = q[0], a01 = q[1], a02 = q[2], b0 = q[3];
        double a11 = q[4], a12 = q[5], b1 = q[6];
        double a22 = q[7], b2 = q[8];
        double det = a00 * (a11 * a22 - a12 * a12) - a01 * (a01 * a22 - a12 * a02) +
                     a02 * (a01 * a12 - a11 * a02);
        double scale = std::max({std::abs(a00), std::abs(a11), std::abs(a22), 1e-300});
        if (std::abs(det) < 1e-10 * scale * scale * scale)
            return false;
        double inv = 1.0 / det;
        double x = -(b0 * (a11 * a22 - a12 * a12) - a01 * (b1 * a22 - a12 * b2) +
                     a02 * (b1 * a12 - a11 * b2)) * inv;
        double y = -(a00 * (b1 * a22 - a12 * b2) - b0 * (a01 * a22 - a02 * a12) +
                     a02 * (a01 * b2 - b1 * a02)) * inv;
        double z = -(a00 * (a11 * b2 - b1 * a12) - a01 * (a01 * b2 - b1 * a02) +
                     b0 * (a01 * a12 - a11 * a02)) * inv;
        out = {x, y, z};
        return true;
    }
};

} // namespace

SegmentedMesh simplify(const SegmentedMesh& mesh, MeshTopology& topo, double target_ratio) {
    if (!(target_ratio > 0.0) || target_ratio > 1.0)
        throw GeometryError("simplify: target_ratio must be in (0,1]");

    SegmentedMesh work = mesh;
    const int nv = static_cast<int>(work.vertices.size());
    std::vector<char> alive_tri(work.triangles.size(), 1);
    std::vector<std::vector<int>> incident(nv);
    for (std::size_t t = 0; t < work.triangles.size(); ++t)
        for (int c = 0; c < 3; ++c)
            incident[work.triangles[t][c]].push_back(static_cast<int>(t));

    std::vector<Quadric> quadric(nv);
    for (std::size_t t = 0; t < work.triangles.size(); ++t) {
        const Tri& tr = work.triangles[t];
        Vec3 n = cross(work.vertices[tr[1]] - work.vertices[tr[0]],
                       work.vertices[tr[2]] - work.vertices[tr[0]]);
        double area2 = norm(n);
        if (area2 < 1e-300)
            continue;
        n = n / area2;
        double d = -dot(n, work.vertices[tr[0]]);
        for (int c = 0; c < 3; ++c)
            quadric[tr[c]].add_plane(n, d, 0.5 * area2);
    }

    auto collapsible_vertex = [&](int v) {
        return topo.vclass[v] == MeshTopology::VertexClass::Interior;
    };

    std::vector<int> version(nv, 0);
    struct Candidate {
        double cost;
        int u, v, version_u, version_v;
        Vec3 pos;
        bool operator<(const Candidate& o) const { return cost > o.cost; } // min-heap
    };
    std::priority_queue<Candidate> heap;

    auto place = [&](int u, int v, Vec3& pos) {
        Quadric q = quadric[u];
        q += quadric[v];
        Vec3 opt;
        if (q.optimum(opt)) {
            pos = opt;
            return q.evaluate(opt);
        }
        Vec3 mid = (work.vertices[u] + work.vertices[v]) * 0.5;
        double best = q.evaluate(mid);
        pos = mid;
        for (const Vec3& cand : {work.vertices[u], work.vertices[v]}) {
            double c = q.evaluate(cand);
            if (c < best) {
                best = c;
                pos = cand;
            }
        }
        return best;
    };

    auto push_edge = [&](int u, int v) {
        if (u > v) std::swap(u, v);
        if (!collapsible_vertex(u) || !collapsible_vertex(v))
            return;
        Candidate c;
        c.u = u;
        c.v = v;
        c.version_u = version[u];
        c.version_v = version[v];
        c.cost = place(u, v, c.pos);
        heap.push(c);
    };

    std::set<std::pair<int, int>> seeded;
    for (std::size_t t = 0; t < work.triangles.size(); ++t) {
        const Tri& tr = work.triangles[t];
        for (int c = 0; c < 3; ++c) {
            int u = tr[c], v = tr[(c + 1) % 3];
            if (u > v) std::swap(u, v);
            if (seeded.insert({u, v}).second)
                push_edge(u, v);
        }
    }

    std::int64_t alive = static_cast<std::int64_t>(work.triangles.size());
    const std::int64_t target =
        std::max<std::int64_t>(4, static_cast<std::int64_t>(std::ceil(target_ratio * alive)));

    auto vertex_neighbors = [&](int v) {
        std::set<int> nb;
        for (int t : incident[v])
            if (alive_tri[t])
                for (int c = 0; c < 3; ++c)
                    if (work.triangles[t][c] != v)
                        nb.insert(work.triangles[t][c]);
        return nb;
    };

    while (alive > target && !heap.empty()) {
        Candidate cand = heap.top();
        heap.pop();
        int u = cand.u, v = cand.v;
        if (cand.version_u != version[u] || cand.version_v != version[v])
            continue;

        // edge may have disappeared
        std::vector<int> shared;
        for (int t : incident[u]) {
            if (!alive_tri[t]) continue;
            const Tri& tr = work.triangles[t];
            if (tr[0] == v || tr[1] == v || tr[2] == v)
                shared.push_back(t);
        }
        if (shared.size() != 2)
            continue;

        // link condition: common neighbors must be exactly the two opposite vertices
        std::set<int> nu = vertex_neighbors(u), nv_set = vertex_neighbors(v);
        std::vector<int> common;
        std::set_intersection(nu.begin(), nu.end(), nv_set.begin(), nv_set.end(),
                              std::back_inserter(common));
        if (common.size() != 2)
            continue;

        // reject collapses that flip or squash surviving triangles
        bool ok = true;
        for (int who : {u, v}) {
            for (int t : incident[who]) {
                if (!alive_tri[t] || t == shared[0] || t == shared[1]) continue;
                const Tri& tr = work.triangles[t];
                Vec3 p[3], np[3];
                for (int c = 0; c < 3; ++c) {
                    p[c] = work.vertices[tr[c]];
                    np[c] = (tr[c] == u || tr[c] == v) ? cand.pos : p[c];
                }
                Vec3 n_old = cross(p[1] - p[0], p[2] - p[0]);
                Vec3 n_new = cross(np[1] - np[0], np[2] - np[0]);
                if (dot(n_old, n_new) <= 0.0 || norm(n_new) < 1e-14) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        if (!ok)
            continue;

        // collapse v into u at the optimal position
        work.vertices[u] = cand.pos;
        quadric[u] += quadric[v];
        for (int t : shared) {
            alive_tri[t] = 0;
            --alive;
        }
        for (int t : incident[v]) {
            if (!alive_tri[t]) continue;
            Tri& tr = work.triangles[t];
            for (int c = 0; c < 3; ++c)
                if (tr[c] == v)
                    tr[c] = u;
            incident[u].push_back(t);
        }
        incident[v].clear();
        version[u]++;
        version[v]++;
        for (int nb : vertex_neighbors(u))
            push_edge(u, nb);
    }

    // compact vertices and triangles
    std::vector<int> remap(nv, -1);
    SegmentedMesh out;
    out.face_count = work.face_count;
    for (std::size_t t = 0; t < work.triangles.size(); ++t) {
        if (!alive_tri[t]) continue;
        Tri tr = work.triangles[t];
        for (int c = 0; c < 3; ++c) {
            if (remap[tr[c]] < 0) {
                remap[tr[c]] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(work.vertices[tr[c]]);
            }
            tr[c] = remap[tr[c]];
        }
        out.triangles.push_back(tr);
        out.labels.push_back(work.labels[t]);
    }

    MeshTopology new_topo;
    new_topo.vclass.assign(out.vertices.size(), MeshTopology::VertexClass::Interior);
    for (int old_v = 0; old_v < nv; ++old_v)
        if (remap[old_v] >= 0)
            new_topo.vclass[remap[old_v]] = topo.vclass[old_v];
    for (int j : topo.junctions)
        new_topo.junctions.push_back(remap[j]);
    for (const auto& chain : topo.chains) {
        MeshTopology::Chain c = chain;
        for (int& v : c.verts)
            v = remap[v];
        new_topo.chains.push_back(std::move(c));
    }
    topo = std::move(new_topo);
    return out;
}

PostprocResult postprocess(const MctOutput& mct, const PostprocOptions& opts) {
    // Fit each open boundary polyline, then pull the points back onto their
    // carrier mesh edge (crossings) or keep them at the junction (covertices).
    std::unordered_map<std::uint64_t, Vec3> crossing_pos;
    std::unordered_map<std::uint64_t, Vec3> covertex_pos;

    for (const BoundarySegment& seg : mct.segments)
        for (const SegmentEndpoint* e : {&seg.e0, &seg.e1}) {
            if (e->kind == SegmentEndpoint::CoVertex)
                covertex_pos[e->key] = e->pos;
            else
                crossing_pos[e->key] = e->pos;
        }

    for (std::size_t e = 0; e < mct.brep.edges.size(); ++e) {
        const auto& edge = mct.brep.edges[e];
        if (edge.closed || edge.polyline.size() < 2)
            continue;
        std::vector<Vec3> fitted =
            fit_boundary(edge.polyline, opts.endpoint_weight, opts.fit_residual_threshold);
        const auto& refs = mct.edge_points[e];
        for (std::size_t p = 0; p < refs.size(); ++p) {
            if (refs[p].covertex)
                continue; // junctions keep their exact position
            int lo = static_cast<int>(refs[p].key >> 32);
            int hi = static_cast<int>(refs[p].key & 0xffffffffu);
            const Vec3& a = mct.labeled.mesh.vertices[lo];
            const Vec3& b = mct.labeled.mesh.vertices[hi];
            Vec3 d = b - a;
            double len2 = norm2(d);
            double t = len2 > 0.0 ? dot(fitted[p] - a, d) / len2 : 0.5;
            t = std::clamp(t, 1e-6, 1.0 - 1e-6);
            crossing_pos[refs[p].key] = lerp(a, b, t);
        }
    }

    PostprocResult result;
    result.mesh = embed_boundaries(mct.labeled, crossing_pos, covertex_pos);
    result.topology = derive_topology(result.mesh);
    if (opts.smooth_iterations > 0)
        result.mesh = smooth(result.mesh, result.topology, opts.smooth_iterations,
                             opts.smooth_damping);
    if (opts.simplify_ratio < 1.0)
        result.mesh = simplify(result.mesh, result.topology, opts.simplify_ratio);
    result.brep = to_faceted_brep(result.mesh, result.topology);
    return result;
}

} // namespace brdf
