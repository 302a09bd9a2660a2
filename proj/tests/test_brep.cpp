#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brdf/brep.hpp"
#include "brdf/encode.hpp"
#include "brdf/mct.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace brdf;
using fixtures::make_box;

TEST_CASE("check_watertight") {
    SegmentedMesh cube = make_box(1, 1, 1);
    CHECK(check_watertight(cube.surface()).watertight);

    SUBCASE("hole reports its three boundary edges") {
        SurfaceMesh holey = cube.surface();
        holey.triangles.pop_back();
        auto report = check_watertight(holey);
        CHECK(!report.watertight);
        CHECK(report.boundary_edges.size() == 3);
    }
    SUBCASE("two disjoint closed components stay watertight") {
        SegmentedMesh a = make_box(0.5, 0.5, 0.5);
        SurfaceMesh two = a.surface();
        int base = static_cast<int>(two.vertices.size());
        for (const Vec3& v : a.vertices)
            two.vertices.push_back(v + Vec3{2, 0, 0});
        for (const Tri& t : a.triangles)
            two.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
        CHECK(check_watertight(two).watertight);
    }
    SUBCASE("isolated vertex is flagged") {
        SurfaceMesh m = cube.surface();
        m.vertices.push_back({9, 9, 9});
        auto report = check_watertight(m);
        CHECK(!report.watertight);
        CHECK(report.isolated_vertices == std::vector<int>{8});
    }
}

namespace {

FacetedBRep tiny_brep() {
    // two faces split along a closed loop on a sphere-like mesh stub
    FacetedBRep b;
    b.mesh.vertices = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, -1}};
    b.mesh.triangles = {{0, 1, 2}, {3, 2, 1}};
    b.faces.push_back({0, {0}});
    b.faces.push_back({1, {1}});
    FacetedBRep::Edge e;
    e.fa = 0;
    e.fb = 1;
    e.closed = true;
    e.polyline = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
    b.edges.push_back(e);
    return b;
}

} // namespace

TEST_CASE("validate_topology flags hand-built violations") {
    CHECK(validate_topology(tiny_brep()).valid());

    SUBCASE("equal face_pair ids") {
        FacetedBRep b = tiny_brep();
        b.edges[0].fb = 0;
        auto report = validate_topology(b);
        CHECK(!report.valid());
    }
    SUBCASE("vertex with fewer than 3 incident edges") {
        FacetedBRep b = tiny_brep();
        b.vertices.push_back({0, 0, 1});
        b.edges[0].closed = false;
        b.edges[0].v0 = 0;
        b.edges[0].v1 = 0;
        auto report = validate_topology(b);
        CHECK(!report.valid()); // vertex has only 2 endpoint incidences
    }
    SUBCASE("triangle covered twice") {
        FacetedBRep b = tiny_brep();
        b.faces[1].triangles.push_back(0);
        CHECK(!validate_topology(b).valid());
    }
    SUBCASE("missing face reference") {
        FacetedBRep b = tiny_brep();
        b.edges[0].fb = 7;
        CHECK(!validate_topology(b).valid());
    }
}

TEST_CASE("quantization buckets") {
    CHECK(quantize_coord(-1.0) == 0);
    CHECK(quantize_coord(1.0) == 15); // clamped top bucket
    CHECK(quantize_coord(0.0) == 8);
    CHECK(quantize_coord(-0.126) == 6);
    // idempotent and monotone per axis
    double prev = -1;
    for (double x = -1.0; x <= 1.0; x += 0.01) {
        double q = quantize_coord(x);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("derive_topology on a minimal cube mesh") {
    SegmentedMesh cube = make_box(1, 1, 1);
    MeshTopology topo = derive_topology(cube);
    CHECK(topo.junctions.size() == 8);
    CHECK(topo.chains.size() == 12);
    for (const auto& c : topo.chains) {
        CHECK(!c.closed);
        CHECK(c.verts.size() == 2);
    }
    FacetedBRep b = to_faceted_brep(cube, topo);
    CHECK(validate_topology(b).valid());
}

TEST_CASE("derive_topology on the slotted box") {
    SegmentedMesh slotted = fixtures::make_slotted_box(1.0, 0.8, 0.6, 0.3, 0.24);
    CHECK(slotted.is_watertight());
    CHECK(oracles::signed_volume(slotted) > 0.0);
    MeshTopology topo = derive_topology(slotted);
    CHECK(topo.junctions.size() == 16);
    CHECK(topo.chains.size() == 24);
    CHECK(validate_topology(to_faceted_brep(slotted, topo)).valid());
}

TEST_CASE("same_topology: cube signatures") {
    SegmentedMesh cube = make_box(1, 1, 1);
    auto normalize = [](SegmentedMesh m) {
        auto [lo, hi] = m.bbox();
        NormalizeTransform t = make_transform(lo, hi);
        for (Vec3& v : m.vertices)
            v = t.to_normalized(v);
        return m;
    };
    SegmentedMesh ncube = normalize(cube);
    TopologySignature sig = topology_signature(to_faceted_brep(ncube, derive_topology(ncube)));

    SUBCASE("reflexive") { CHECK(same_topology(sig, sig)); }

    SUBCASE("stable under sub-bucket translation") {
        SegmentedMesh moved = ncube;
        for (Vec3& v : moved.vertices)
            v += Vec3{0.01, 0.01, 0.01}; // well under half a bucket (0.0625)
        TopologySignature sig2 =
            topology_signature(to_faceted_brep(moved, derive_topology(moved)));
        CHECK(same_topology(sig, sig2));
        CHECK(same_topology(sig2, sig)); // symmetric
    }

    SUBCASE("face relabeling does not matter") {
        SegmentedMesh relabeled = ncube;
        for (int& l : relabeled.labels)
            l = (l + 2) % 6;
        TopologySignature sig2 =
            topology_signature(to_faceted_brep(relabeled, derive_topology(relabeled)));
        CHECK(same_topology(sig, sig2));
    }

    SUBCASE("different primitive differs") {
        SegmentedMesh prism =
            normalize(fixtures::make_extrusion({{0, 0}, {1, 0}, {0.29, 0.64}}, 0.56));
        TopologySignature sig2 =
            topology_signature(to_faceted_brep(prism, derive_topology(prism)));
        CHECK(!same_topology(sig, sig2));
    }

    SUBCASE("beyond-bucket translation differs") {
        SegmentedMesh moved = ncube;
        for (Vec3& v : moved.vertices)
            v += Vec3{0.13, 0.0, 0.0}; // more than one bucket (0.125)
        TopologySignature sig2 =
            topology_signature(to_faceted_brep(moved, derive_topology(moved)));
        CHECK(!same_topology(sig, sig2));
    }
}

TEST_CASE("signatures survive the MCT roundtrip") {
    SegmentedMesh box = make_box(1.0, 0.62, 0.45);
    BrDf enc = encode_brdf(box, 64);
    SegmentedMesh norm_box = box;
    for (Vec3& v : norm_box.vertices)
        v = enc.transform().to_normalized(v);
    TopologySignature input_sig =
        topology_signature(to_faceted_brep(norm_box, derive_topology(norm_box)));

    MctOutput out = run_mct(enc);
    TopologySignature recon_sig = topology_signature(out.brep);
    CHECK(same_topology(input_sig, recon_sig));
}
