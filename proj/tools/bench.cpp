// Compares the OpenMP kernels against their serial references on a synthetic
// model: encoding, iso-surface extraction, smoothing, and Chamfer distance.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "brdf/encode.hpp"
#include "brdf/mct.hpp"
#include "brdf/metrics.hpp"
#include "brdf/postproc.hpp"
#include "brdf/synthetic.hpp"

using namespace brdf;

namespace {

template <typename F>
double time_it(F&& fn, int repeats = 3) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

SegmentedMesh make_cube_mesh() {
    SegmentedMesh m;
    m.vertices = {{-0.5, -0.5, -0.5}, {0.5, -0.5, -0.5}, {0.5, 0.5, -0.5}, {-0.5, 0.5, -0.5},
                  {-0.5, -0.5, 0.5},  {0.5, -0.5, 0.5},  {0.5, 0.5, 0.5},  {-0.5, 0.5, 0.5}};
    auto quad = [&](int a, int b, int c, int d, int label) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
        m.labels.push_back(label);
        m.labels.push_back(label);
    };
    quad(0, 3, 2, 1, 0); // z-
    quad(4, 5, 6, 7, 1); // z+
    quad(0, 1, 5, 4, 2); // y-
    quad(2, 3, 7, 6, 3); // y+
    quad(0, 4, 7, 3, 4); // x-
    quad(1, 2, 6, 5, 5); // x+
    m.face_count = 6;
    return m;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-18s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n", name, serial,
                parallel, serial / parallel);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serially\n");
#endif

    SegmentedMesh cube = make_cube_mesh();
    report("encode 64^3",
           time_it([&] { encode_brdf_serial(cube, 64); }, 2),
           time_it([&] { encode_brdf(cube, 64); }, 2));

    BrDf model = make_synthetic_brdf(7, 64);
    report("marching cubes",
           time_it([&] { marching_cubes_serial(model.sdf); }),
           time_it([&] { marching_cubes(model.sdf); }));

    MctOutput mct = run_mct(model);
    std::unordered_map<std::uint64_t, Vec3> crossings, covertices;
    for (const auto& seg : mct.segments)
        for (const SegmentEndpoint* e : {&seg.e0, &seg.e1})
            (e->kind == SegmentEndpoint::CoVertex ? covertices : crossings)[e->key] = e->pos;
    SegmentedMesh embedded = embed_boundaries(mct.labeled, crossings, covertices);
    MeshTopology topo = derive_topology(embedded);
    report("smooth x20",
           time_it([&] { smooth_serial(embedded, topo, 20); }),
           time_it([&] { smooth(embedded, topo, 20); }));

    std::vector<Vec3> pa = sample_surface(mct.brep.mesh, 20000, 1);
    std::vector<Vec3> pb = sample_surface(mct.brep.mesh, 20000, 2);
    report("chamfer 20k",
           time_it([&] { chamfer_serial(pa, pb); }, 1),
           time_it([&] { chamfer(pa, pb); }, 1));
    return 0;
}
