#include "brdf/grid.hpp"

#include <cmath>

namespace brdf {

NormalizeTransform make_transform(const Vec3& bbox_min, const Vec3& bbox_max) {
    Vec3 diag = bbox_max - bbox_min;
    if (!(diag.x > 0.0 || diag.y > 0.0 || diag.z > 0.0))
        throw GeometryError("make_transform: degenerate bounding box (zero diagonal)");
    double extent = max_component(diag);
    NormalizeTransform t;
    t.center = (bbox_min + bbox_max) * 0.5;
    t.scale = 2.0 / (1.4 * extent);
    return t;
}

namespace {

struct AxisSample {
    int i0;
    double t;
};

// Snap to the node when within rounding slop of it so that node queries
// reproduce stored values bit-exactly.
AxisSample locate(double x, int res) {
    double u = 0.5 * (x + 1.0) * (res - 1);
    double fl = std::floor(u);
    int i0 = static_cast<int>(fl);
    double t = u - fl;
    constexpr double snap = 1e-9;
    if (t < snap) {
        t = 0.0;
    } else if (t > 1.0 - snap) {
        i0 += 1;
        t = 0.0;
    }
    if (i0 < 0) { i0 = 0; t = 0.0; }
    if (i0 > res - 1) { i0 = res - 1; t = 0.0; }
    return {i0, t};
}

} // namespace

double ScalarField3::sample(const Vec3& p) const {
    constexpr double eps = 1e-12;
    if (p.x < -1.0 - eps || p.x > 1.0 + eps || p.y < -1.0 - eps || p.y > 1.0 + eps ||
        p.z < -1.0 - eps || p.z > 1.0 + eps)
        throw GeometryError("sample: point outside normalized domain [-1,1]^3");

    AxisSample ax = locate(p.x, resolution);
    AxisSample ay = locate(p.y, resolution);
    AxisSample az = locate(p.z, resolution);
    int i1 = ax.t == 0.0 ? ax.i0 : ax.i0 + 1;
    int j1 = ay.t == 0.0 ? ay.i0 : ay.i0 + 1;
    int k1 = az.t == 0.0 ? az.i0 : az.i0 + 1;

    double c000 = at(ax.i0, ay.i0, az.i0);
    double c001 = at(ax.i0, ay.i0, k1);
    double c010 = at(ax.i0, j1, az.i0);
    double c011 = at(ax.i0, j1, k1);
    double c100 = at(i1, ay.i0, az.i0);
    double c101 = at(i1, ay.i0, k1);
    double c110 = at(i1, j1, az.i0);
    double c111 = at(i1, j1, k1);

    double c00 = c000 + (c001 - c000) * az.t;
    double c01 = c010 + (c011 - c010) * az.t;
    double c10 = c100 + (c101 - c100) * az.t;
    double c11 = c110 + (c111 - c110) * az.t;
    double c0 = c00 + (c01 - c00) * ay.t;
    double c1 = c10 + (c11 - c10) * ay.t;
    return c0 + (c1 - c0) * ax.t;
}

void BrDf::validate() const {
    if (udfs.empty())
        throw GeometryError("BrDf: at least one UDF required");
    std::size_t n = static_cast<std::size_t>(sdf.resolution) * sdf.resolution * sdf.resolution;
    if (sdf.values.size() != n)
        throw GeometryError("BrDf: SDF value count does not match resolution");
    for (std::size_t f = 0; f < udfs.size(); ++f) {
        const ScalarField3& u = udfs[f];
        if (u.resolution != sdf.resolution || u.truncation != sdf.truncation ||
            !(u.transform.center == sdf.transform.center) || u.transform.scale != sdf.transform.scale)
            throw GeometryError("BrDf: UDF " + std::to_string(f) + " does not share grid/transform");
        if (u.values.size() != n)
            throw GeometryError("BrDf: UDF " + std::to_string(f) + " value count mismatch");
        for (float v : u.values)
            if (v < 0.0f || v > u.truncation + 1e-7)
                throw GeometryError("BrDf: UDF " + std::to_string(f) + " value out of [0, truncation]");
    }
    for (float v : sdf.values)
        if (std::abs(v) > sdf.truncation + 1e-7)
            throw GeometryError("BrDf: SDF value exceeds truncation");
}

} // namespace brdf
