// The OpenMP kernels must reproduce their serial references bit for bit.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brdf/encode.hpp"
#include "brdf/mct.hpp"
#include "brdf/metrics.hpp"
#include "brdf/postproc.hpp"
#include "brdf/synthetic.hpp"
#include "fixtures.hpp"

using namespace brdf;

TEST_CASE("encode: parallel == serial") {
    SegmentedMesh box = fixtures::make_box(1.0, 0.62, 0.45);
    BrDf par = encode_brdf(box, 32);
    BrDf ser = encode_brdf_serial(box, 32);
    CHECK(par.sdf.values == ser.sdf.values);
    for (int f = 0; f < par.face_count(); ++f)
        CHECK(par.udfs[f].values == ser.udfs[f].values);
}

TEST_CASE("marching cubes: parallel == serial on synthetic fields") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        BrDf model = make_synthetic_brdf(seed, 48);
        SurfaceMesh a = marching_cubes(model.sdf);
        SurfaceMesh b = marching_cubes_serial(model.sdf);
        REQUIRE(a.vertices.size() == b.vertices.size());
        bool vertices_equal = true, triangles_equal = a.triangles == b.triangles;
        for (std::size_t v = 0; v < a.vertices.size(); ++v)
            vertices_equal = vertices_equal && a.vertices[v] == b.vertices[v];
        CHECK(vertices_equal);
        CHECK(triangles_equal);
    }
}

TEST_CASE("smooth: parallel == serial") {
    BrDf model = make_synthetic_brdf(11, 48);
    MctOutput mct = run_mct(model);
    std::unordered_map<std::uint64_t, Vec3> crossings, covertices;
    for (const auto& seg : mct.segments)
        for (const SegmentEndpoint* e : {&seg.e0, &seg.e1})
            (e->kind == SegmentEndpoint::CoVertex ? covertices : crossings)[e->key] = e->pos;
    SegmentedMesh embedded = embed_boundaries(mct.labeled, crossings, covertices);
    MeshTopology topo = derive_topology(embedded);

    SegmentedMesh a = smooth(embedded, topo, 10);
    SegmentedMesh b = smooth_serial(embedded, topo, 10);
    REQUIRE(a.vertices.size() == b.vertices.size());
    bool equal = true;
    for (std::size_t v = 0; v < a.vertices.size(); ++v)
        equal = equal && a.vertices[v] == b.vertices[v];
    CHECK(equal);
}

TEST_CASE("chamfer: kd-tree kernel == exhaustive reference") {
    BrDf model = make_synthetic_brdf(5, 48);
    SurfaceMesh mesh = marching_cubes(model.sdf);
    auto a = sample_surface(mesh, 600, 1);
    auto b = sample_surface(mesh, 500, 2);
    CHECK(chamfer(a, b) == doctest::Approx(chamfer_serial(a, b)).epsilon(1e-13));
}

TEST_CASE("repeated runs are deterministic") {
    BrDf m1 = make_synthetic_brdf(99, 48);
    BrDf m2 = make_synthetic_brdf(99, 48);
    CHECK(m1.sdf.values == m2.sdf.values);

    MctOutput a = run_mct(m1), b = run_mct(m2);
    CHECK(a.brep.vertices.size() == b.brep.vertices.size());
    CHECK(a.brep.edges.size() == b.brep.edges.size());
    bool equal = a.brep.mesh.triangles == b.brep.mesh.triangles;
    for (std::size_t v = 0; v < a.brep.mesh.vertices.size() && equal; ++v)
        equal = a.brep.mesh.vertices[v] == b.brep.mesh.vertices[v];
    CHECK(equal);
}
