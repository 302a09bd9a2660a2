#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "brdf/grid.hpp"
#include "oracles.hpp"

using namespace brdf;

TEST_CASE("make_transform: centered unit cube") {
    auto t = make_transform({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
    CHECK(t.center.x == doctest::Approx(0.0));
    CHECK(t.center.y == doctest::Approx(0.0));
    CHECK(t.center.z == doctest::Approx(0.0));
    // cube side 1.4 x max extent -> scale 2/1.4
    CHECK(t.scale == doctest::Approx(1.428571).epsilon(1e-6));
}

TEST_CASE("make_transform: anisotropic box") {
    auto t = make_transform({0, 0, 0}, {1, 2, 1});
    CHECK(t.center.x == doctest::Approx(0.5));
    CHECK(t.center.y == doctest::Approx(1.0));
    CHECK(t.center.z == doctest::Approx(0.5));
    CHECK(t.scale == doctest::Approx(0.714286).epsilon(1e-6));
}

TEST_CASE("make_transform: degenerate bbox is rejected") {
    CHECK_THROWS_AS(make_transform({1, 1, 1}, {1, 1, 1}), GeometryError);
}

TEST_CASE("make_transform: corners stay inside the domain with margin") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int iter = 0; iter < 200; ++iter) {
        Vec3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
        Vec3 lo = min(a, b), hi = max(a, b);
        if (max_component(hi - lo) < 1e-6)
            continue;
        auto t = make_transform(lo, hi);
        for (int corner = 0; corner < 8; ++corner) {
            Vec3 c{corner & 1 ? hi.x : lo.x, corner & 2 ? hi.y : lo.y, corner & 4 ? hi.z : lo.z};
            Vec3 n = t.to_normalized(c);
            // 20% margin: the largest axis reaches exactly 1/1.4
            CHECK(std::abs(n.x) <= 1.0 / 1.4 + 1e-12);
            CHECK(std::abs(n.y) <= 1.0 / 1.4 + 1e-12);
            CHECK(std::abs(n.z) <= 1.0 / 1.4 + 1e-12);
        }
    }
}

TEST_CASE("transform round trip") {
    auto t = make_transform({-1, 2, -3}, {4, 5, 6});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        Vec3 p{u(rng), u(rng), u(rng)};
        Vec3 q = t.to_world(t.to_normalized(p));
        CHECK(norm(q - p) < 1e-12 * (1.0 + norm(p)));
    }
}

TEST_CASE("trilinear sampling is exact at grid nodes") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    ScalarField3 f(16, 0.1, NormalizeTransform{});
    for (float& v : f.values)
        v = static_cast<float>(u(rng));
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            for (int k = 0; k < 16; ++k) {
                double s = f.sample(f.node_position(i, j, k));
                CHECK(s == static_cast<double>(f.at(i, j, k))); // bit-exact
            }
}

TEST_CASE("trilinear midpoint of two adjacent nodes") {
    ScalarField3 f(4, 0.1, NormalizeTransform{});
    f.at(1, 1, 1) = 0.0f;
    f.at(1, 1, 2) = 0.1f;
    Vec3 a = f.node_position(1, 1, 1), b = f.node_position(1, 1, 2);
    double expected = 0.5 * (static_cast<double>(f.at(1, 1, 1)) + f.at(1, 1, 2));
    CHECK(f.sample((a + b) * 0.5) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(f.sample((a + b) * 0.5) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("trilinear stays within the corner bounds") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.1, 0.1), coords(-1.0, 1.0);
    ScalarField3 f(8, 0.1, NormalizeTransform{});
    for (float& v : f.values)
        v = static_cast<float>(u(rng));
    for (int iter = 0; iter < 5000; ++iter) {
        Vec3 p{coords(rng), coords(rng), coords(rng)};
        double s = f.sample(p);
        // brute-force scan of the surrounding cell's corners
        auto cell = [&](double x) {
            int c = static_cast<int>(std::floor((x + 1.0) * 0.5 * 7));
            return std::clamp(c, 0, 6);
        };
        int i = cell(p.x), j = cell(p.y), k = cell(p.z);
        double lo = 1e300, hi = -1e300;
        for (int d = 0; d < 8; ++d) {
            double v = f.at(i + (d & 1), j + ((d >> 1) & 1), k + ((d >> 2) & 1));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(s >= lo - 1e-12);
        CHECK(s <= hi + 1e-12);
    }
}

TEST_CASE("sampling outside the domain throws") {
    ScalarField3 f(4, 0.1, NormalizeTransform{});
    CHECK_THROWS_AS(f.sample({1.5, 0, 0}), GeometryError);
    CHECK_THROWS_AS(f.sample({0, -1.1, 0}), GeometryError);
}

TEST_CASE("BrDf validation catches mismatched grids") {
    BrDf b;
    b.sdf = ScalarField3(8, 0.1, NormalizeTransform{});
    b.udfs.push_back(ScalarField3(8, 0.1, NormalizeTransform{}));
    CHECK_NOTHROW(b.validate());

    b.udfs.push_back(ScalarField3(16, 0.1, NormalizeTransform{}));
    CHECK_THROWS_AS(b.validate(), GeometryError);

    b.udfs.pop_back();
    b.udfs[0].values[3] = -0.01f;
    CHECK_THROWS_AS(b.validate(), GeometryError);
}
