#include "brdf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "brdf/encode.hpp"

namespace brdf {

KdTree3::KdTree3(std::vector<Vec3> points) {
    if (points.empty())
        throw GeometryError("KdTree3: empty point set");
    nodes_.reserve(points.size());
    root_ = build(points, 0, static_cast<int>(points.size()), 0);
}

int KdTree3::build(std::vector<Vec3>& pts, int begin, int end, int depth) {
    if (begin >= end)
        return -1;
    int axis = depth % 3;
    int mid = (begin + end) / 2;
    std::nth_element(pts.begin() + begin, pts.begin() + mid, pts.begin() + end,
                     [axis](const Vec3& a, const Vec3& b) { return a[axis] < b[axis]; });
    Node node;
    node.point = pts[mid];
    node.axis = axis;
    int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build(pts, begin, mid, depth + 1);
    int right = build(pts, mid + 1, end, depth + 1);
    nodes_[idx].left = left;
    nodes_[idx].right = right;
    return idx;
}

void KdTree3::query(int node, const Vec3& q, double& best2) const {
    if (node < 0)
        return;
    const Node& n = nodes_[node];
    best2 = std::min(best2, norm2(n.point - q));
    double delta = q[n.axis] - n.point[n.axis];
    int near = delta < 0.0 ? n.left : n.right;
    int far = delta < 0.0 ? n.right : n.left;
    query(near, q, best2);
    if (delta * delta < best2)
        query(far, q, best2);
}

double KdTree3::nearest_distance(const Vec3& q) const {
    double best2 = std::numeric_limits<double>::max();
    query(root_, q, best2);
    return std::sqrt(best2);
}

std::vector<Vec3> sample_surface(const SurfaceMesh& mesh, int n, std::uint64_t seed) {
    if (mesh.triangles.empty())
        throw GeometryError("sample_surface: empty mesh");

    std::vector<double> cdf(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Tri& tr = mesh.triangles[t];
        total += triangle_area(mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]);
        cdf[t] = total;
    }
    if (total <= 0.0)
        throw GeometryError("sample_surface: zero total area");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<Vec3> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i) {
        double pick = uniform(rng) * total;
        std::size_t t = std::lower_bound(cdf.begin(), cdf.end(), pick) - cdf.begin();
        if (t >= cdf.size()) t = cdf.size() - 1;
        const Tri& tr = mesh.triangles[t];
        double u = uniform(rng), v = uniform(rng);
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const Vec3& a = mesh.vertices[tr[0]];
        points.push_back(a + (mesh.vertices[tr[1]] - a) * u + (mesh.vertices[tr[2]] - a) * v);
    }
    return points;
}

namespace {

double one_sided_mean(const std::vector<Vec3>& from, const KdTree3& to) {
    const std::int64_t n = static_cast<std::int64_t>(from.size());
    std::vector<double> dist(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        dist[i] = to.nearest_distance(from[i]);
    // serial sum keeps results bit-stable across thread counts
    double sum = 0.0;
    for (double d : dist)
        sum += d;
    return sum / static_cast<double>(n);
}

} // namespace

double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty())
        throw GeometryError("chamfer: empty point set");
    KdTree3 tree_a(a), tree_b(b);
    return 0.5 * (one_sided_mean(a, tree_b) + one_sided_mean(b, tree_a));
}

double chamfer_serial(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty())
        throw GeometryError("chamfer: empty point set");
    auto one_sided = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
        double sum = 0.0;
        for (const Vec3& p : from) {
            double best2 = std::numeric_limits<double>::max();
            for (const Vec3& q : to)
                best2 = std::min(best2, norm2(p - q));
            sum += std::sqrt(best2);
        }
        return sum / static_cast<double>(from.size());
    };
    return 0.5 * (one_sided(a, b) + one_sided(b, a));
}

double surface_chamfer(const SurfaceMesh& a, const SurfaceMesh& b, int n, std::uint64_t seed) {
    if (a.triangles.empty() || b.triangles.empty())
        throw GeometryError("surface_chamfer: empty mesh");

    auto build_index = [](const SurfaceMesh& m) {
        std::vector<int> ids(m.triangles.size());
        std::iota(ids.begin(), ids.end(), 0);
        return TriangleBvh(m.vertices, m.triangles, std::move(ids));
    };
    TriangleBvh tree_a = build_index(a), tree_b = build_index(b);
    std::vector<Vec3> pa = sample_surface(a, n, seed);
    std::vector<Vec3> pb = sample_surface(b, n, seed + 1);

    auto one_sided = [](const std::vector<Vec3>& pts, const TriangleBvh& tree) {
        const std::int64_t m = static_cast<std::int64_t>(pts.size());
        std::vector<double> dist(m);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < m; ++i)
            dist[i] = tree.distance(pts[i]);
        double sum = 0.0;
        for (double d : dist)
            sum += d;
        return sum / static_cast<double>(m);
    };
    return 0.5 * (one_sided(pa, tree_b) + one_sided(pb, tree_a));
}

double invalid_rate(const std::vector<bool>& conversion_ok) {
    if (conversion_ok.empty())
        throw GeometryError("invalid_rate: empty outcome list");
    std::size_t failures = 0;
    for (bool ok : conversion_ok)
        if (!ok)
            ++failures;
    return 100.0 * static_cast<double>(failures) / static_cast<double>(conversion_ok.size());
}

double same_topology_rate(
    const std::vector<std::pair<const TopologySignature*, const TopologySignature*>>& pairs) {
    if (pairs.empty())
        throw GeometryError("same_topology_rate: empty pair list");
    std::size_t matches = 0;
    for (const auto& [a, b] : pairs)
        if (same_topology(*a, *b))
            ++matches;
    return 100.0 * static_cast<double>(matches) / static_cast<double>(pairs.size());
}

namespace {

constexpr int kJsdRes = 28;

std::vector<double> occupancy_histogram(const std::vector<std::vector<Vec3>>& shapes) {
    std::vector<double> hist(kJsdRes * kJsdRes * kJsdRes, 0.0);
    for (const auto& pts : shapes) {
        std::vector<char> occ(hist.size(), 0);
        for (const Vec3& p : pts) {
            auto bucket = [](double x) {
                int b = static_cast<int>(std::floor((x + 1.0) * 0.5 * kJsdRes));
                return std::clamp(b, 0, kJsdRes - 1);
            };
            occ[(bucket(p.x) * kJsdRes + bucket(p.y)) * kJsdRes + bucket(p.z)] = 1;
        }
        for (std::size_t i = 0; i < hist.size(); ++i)
            hist[i] += occ[i];
    }
    double total = std::accumulate(hist.begin(), hist.end(), 0.0);
    if (total > 0.0)
        for (double& h : hist)
            h /= total;
    return hist;
}

double jensen_shannon(const std::vector<double>& p, const std::vector<double>& q) {
    double jsd = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0)
            jsd += 0.5 * p[i] * std::log(p[i] / m);
        if (q[i] > 0.0)
            jsd += 0.5 * q[i] * std::log(q[i] / m);
    }
    return jsd;
}

} // namespace

SetMetrics set_metrics(const std::vector<std::vector<Vec3>>& generated,
                       const std::vector<std::vector<Vec3>>& reference) {
    if (generated.empty() || reference.empty())
        throw GeometryError("set_metrics: empty shape set");

    const std::int64_t ng = static_cast<std::int64_t>(generated.size());
    const std::int64_t nr = static_cast<std::int64_t>(reference.size());
    std::vector<double> cd(ng * nr);

    std::vector<KdTree3> ref_trees;
    ref_trees.reserve(nr);
    for (const auto& pts : reference)
        ref_trees.emplace_back(pts);
    std::vector<KdTree3> gen_trees;
    gen_trees.reserve(ng);
    for (const auto& pts : generated)
        gen_trees.emplace_back(pts);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t g = 0; g < ng; ++g)
        for (std::int64_t r = 0; r < nr; ++r) {
            double ab = 0.0;
            for (const Vec3& p : generated[g])
                ab += ref_trees[r].nearest_distance(p);
            ab /= static_cast<double>(generated[g].size());
            double ba = 0.0;
            for (const Vec3& p : reference[r])
                ba += gen_trees[g].nearest_distance(p);
            ba /= static_cast<double>(reference[r].size());
            cd[g * nr + r] = 0.5 * (ab + ba);
        }

    SetMetrics out;
    std::vector<char> covered(nr, 0);
    for (std::int64_t g = 0; g < ng; ++g) {
        std::int64_t best = 0;
        for (std::int64_t r = 1; r < nr; ++r)
            if (cd[g * nr + r] < cd[g * nr + best])
                best = r;
        covered[best] = 1;
    }
    out.coverage_pct =
        100.0 * std::count(covered.begin(), covered.end(), 1) / static_cast<double>(nr);

    double mmd = 0.0;
    for (std::int64_t r = 0; r < nr; ++r) {
        double best = cd[r];
        for (std::int64_t g = 1; g < ng; ++g)
            best = std::min(best, cd[g * nr + r]);
        mmd += best;
    }
    out.mmd = mmd / static_cast<double>(nr);

    out.jsd = jensen_shannon(occupancy_histogram(generated), occupancy_histogram(reference));
    return out;
}

DedupResult dedup(const std::vector<TopologySignature>& signatures) {
    DedupResult out;
    const int n = static_cast<int>(signatures.size());
    if (n == 0) {
        out.unique_pct = 100.0;
        return out;
    }
    std::vector<int> group(n, -1);
    std::vector<std::vector<int>> members;
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (std::size_t g = 0; g < members.size() && !placed; ++g) {
            if (same_topology(signatures[members[g][0]], signatures[i])) {
                members[g].push_back(i);
                group[i] = static_cast<int>(g);
                placed = true;
            }
        }
        if (!placed) {
            group[i] = static_cast<int>(members.size());
            members.push_back({i});
        }
    }
    int unique = 0;
    for (const auto& m : members) {
        if (m.size() == 1)
            ++unique;
        else
            out.duplicates[m[0]] = m;
    }
    out.unique_pct = 100.0 * static_cast<double>(unique) / static_cast<double>(n);
    return out;
}

} // namespace brdf
