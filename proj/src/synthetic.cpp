#include "brdf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace brdf {

namespace {

struct Primitive {
    bool sphere = true;
    Vec3 center;
    Vec3 half; // sphere: half.x is the radius
};

double primitive_distance(const Primitive& p, const Vec3& q) {
    if (p.sphere)
        return norm(q - p.center) - p.half.x;
    Vec3 d = {std::abs(q.x - p.center.x) - p.half.x, std::abs(q.y - p.center.y) - p.half.y,
              std::abs(q.z - p.center.z) - p.half.z};
    Vec3 outside = max(d, Vec3{0, 0, 0});
    double inside = std::min(0.0, max_component(d));
    return norm(outside) + inside;
}

// polynomial smooth min
double smooth_min(double a, double b, double k) {
    double h = std::clamp(0.5 + 0.5 * (b - a) / k, 0.0, 1.0);
    return b + (a - b) * h - k * h * (1.0 - h);
}

} // namespace

BrDf make_synthetic_brdf(std::uint64_t seed, int resolution, double truncation) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    auto range = [&](double lo, double hi) { return lo + (hi - lo) * uniform(rng); };

    int prim_count = 1 + static_cast<int>(uniform(rng) * 5.0);
    prim_count = std::min(prim_count, 5);
    std::vector<Primitive> prims(prim_count);
    for (auto& p : prims) {
        p.sphere = uniform(rng) < 0.5;
        p.center = {range(-0.4, 0.4), range(-0.4, 0.4), range(-0.4, 0.4)};
        if (p.sphere)
            p.half = {range(0.15, 0.35), 0, 0};
        else
            p.half = {range(0.12, 0.3), range(0.12, 0.3), range(0.12, 0.3)};
    }
    double blend = range(0.02, 0.08);

    auto sdf_value = [&](const Vec3& q) {
        double d = primitive_distance(prims[0], q);
        for (int p = 1; p < prim_count; ++p)
            d = smooth_min(d, primitive_distance(prims[p], q), blend);
        return d;
    };

    // Voronoi seed sites: project random directions onto the zero level set
    // by bisection from the center of a primitive.
    int site_count = 3 + static_cast<int>(uniform(rng) * 13.0);
    site_count = std::min(site_count, 15);
    std::vector<Vec3> sites;
    while (static_cast<int>(sites.size()) < site_count) {
        const Primitive& host = prims[static_cast<std::size_t>(uniform(rng) * prim_count) % prim_count];
        Vec3 dir = normalize(Vec3{range(-1, 1), range(-1, 1), range(-1, 1)});
        if (norm(dir) < 0.5)
            continue;
        Vec3 inside = host.center;
        if (sdf_value(inside) >= 0.0)
            continue;
        Vec3 outside = inside + dir * 2.0;
        for (int it = 0; it < 48; ++it) {
            Vec3 mid = (inside + outside) * 0.5;
            (sdf_value(mid) < 0.0 ? inside : outside) = mid;
        }
        sites.push_back((inside + outside) * 0.5);
    }

    NormalizeTransform identity; // fields are authored directly in [-1,1]^3
    BrDf out;
    out.sdf = ScalarField3(resolution, truncation, identity);
    out.udfs.assign(site_count, ScalarField3(resolution, truncation, identity));

    const std::int64_t nodes = static_cast<std::int64_t>(resolution) * resolution * resolution;
#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < nodes; ++n) {
        int i = static_cast<int>(n / (resolution * resolution));
        int j = static_cast<int>((n / resolution) % resolution);
        int k = static_cast<int>(n % resolution);
        Vec3 q = out.sdf.node_position(i, j, k);
        out.sdf.values[n] =
            static_cast<float>(std::clamp(sdf_value(q), -truncation, truncation));
        for (int s = 0; s < site_count; ++s)
            out.udfs[s].values[n] =
                static_cast<float>(std::min(norm(q - sites[s]), truncation));
    }
    return out;
}

} // namespace brdf
