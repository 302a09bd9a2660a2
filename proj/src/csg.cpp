#include "brdf/csg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace brdf {

namespace {

// The container stores only center and scale, so the tightest per-axis box is
// unrecoverable; the max-extent cube reproduces the original transform when a
// model is combined with itself.
void source_bbox(const BrDf& m, Vec3& lo, Vec3& hi) {
    double half = 1.0 / (1.4 * m.transform().scale);
    lo = m.transform().center - Vec3{half, half, half};
    hi = m.transform().center + Vec3{half, half, half};
}

// Sample a source field at a world point, rescaled into the target
// normalization; outside the source domain the truncation plateau applies.
double resample(const ScalarField3& f, const Vec3& world, double scale_ratio, double fallback) {
    Vec3 q = f.transform.to_normalized(world);
    constexpr double slack = 1e-9; // absorbs round-trip wobble at the domain rim
    if (q.x < -1.0 - slack || q.x > 1.0 + slack || q.y < -1.0 - slack || q.y > 1.0 + slack ||
        q.z < -1.0 - slack || q.z > 1.0 + slack)
        return fallback;
    q.x = std::clamp(q.x, -1.0, 1.0);
    q.y = std::clamp(q.y, -1.0, 1.0);
    q.z = std::clamp(q.z, -1.0, 1.0);
    return f.sample(q) * scale_ratio;
}

} // namespace

BrDf combine(const std::vector<const BrDf*>& models, BoolOp op, int resolution) {
    if (models.size() < 2)
        throw GeometryError("combine: need at least 2 models");
    for (const BrDf* m : models)
        m->validate();

    Vec3 lo, hi;
    source_bbox(*models[0], lo, hi);
    for (std::size_t m = 1; m < models.size(); ++m) {
        Vec3 mlo, mhi;
        source_bbox(*models[m], mlo, mhi);
        lo = min(lo, mlo);
        hi = max(hi, mhi);
    }
    NormalizeTransform transform = make_transform(lo, hi);

    int res = resolution;
    if (res == 0)
        for (const BrDf* m : models)
            res = std::max(res, m->resolution());
    double tau = models[0]->truncation();

    BrDf out;
    out.sdf = ScalarField3(res, tau, transform);
    int total_faces = 0;
    for (const BrDf* m : models)
        total_faces += m->face_count();
    out.udfs.assign(total_faces, ScalarField3(res, tau, transform));

    const std::int64_t nodes = static_cast<std::int64_t>(res) * res * res;
    const bool is_union = op == BoolOp::Union;

#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < nodes; ++n) {
        int i = static_cast<int>(n / (res * res));
        int j = static_cast<int>((n / res) % res);
        int k = static_cast<int>(n % res);
        Vec3 world = transform.to_world(out.sdf.node_position(i, j, k));

        double combined = 0.0;
        int face_base = 0;
        for (std::size_t m = 0; m < models.size(); ++m) {
            const BrDf& model = *models[m];
            double ratio = transform.scale / model.transform().scale;
            double s = resample(model.sdf, world, ratio, tau);
            s = std::clamp(s, -tau, tau);
            combined = m == 0 ? s : (is_union ? std::min(combined, s) : std::max(combined, s));
            for (int f = 0; f < model.face_count(); ++f) {
                double u = resample(model.udfs[f], world, ratio, tau);
                out.udfs[face_base + f].values[n] = static_cast<float>(std::clamp(u, 0.0, tau));
            }
            face_base += model.face_count();
        }
        out.sdf.values[n] = static_cast<float>(combined);
    }
    return out;
}

FacetedBRep prune_empty_faces(FacetedBRep b) {
    std::set<int> bordered;
    for (const auto& e : b.edges) {
        bordered.insert(e.fa);
        bordered.insert(e.fb);
    }
    std::vector<FacetedBRep::Face> kept;
    for (auto& f : b.faces) {
        if (f.triangles.empty() && !bordered.count(f.label))
            continue;
        kept.push_back(std::move(f));
    }
    b.faces = std::move(kept);
    return b;
}

} // namespace brdf
