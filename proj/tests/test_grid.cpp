#include <doctest.h>

#include "cylwave/grid.hpp"

using namespace cylwave;

namespace {

const Box3 kOuter{{-1.8, -0.8, -0.8}, {1.8, 0.8, 0.8}};
const Box3 kInner{{-1.6, -0.6, -0.6}, {1.6, 0.6, 0.6}};

} // namespace

TEST_CASE("build_grid node counts") {
    const Grid3 g = build_grid(kOuter, 0.1);
    CHECK(g.n[0] == 37);
    CHECK(g.n[1] == 17);
    CHECK(g.n[2] == 17);
    CHECK(g.count() == 37u * 17u * 17u);

    const Grid3 cube = build_grid(Box3{{0, 0, 0}, {1, 1, 1}}, 1.0);
    CHECK(cube.n[0] == 2);
    CHECK(cube.n[1] == 2);
    CHECK(cube.n[2] == 2);

    const Grid3 inner = build_grid(kInner, 0.1);
    CHECK(inner.n[0] == 33);
    CHECK(inner.n[1] == 13);
    CHECK(inner.n[2] == 13);
}

TEST_CASE("build_grid rejects non-divisible extents") {
    CHECK_THROWS_AS(build_grid(Box3{{0, 0, 0}, {1.05, 1, 1}}, 0.1), NonDivisibleExtent);
    CHECK_THROWS_AS(build_grid(kOuter, -0.1), NonDivisibleExtent);
    CHECK_THROWS_AS(build_grid(Box3{{0, 0, 0}, {0, 1, 1}}, 0.1), NonDivisibleExtent);
}

TEST_CASE("classify_face tags and priority") {
    const Grid3 g = build_grid(kOuter, 0.1);
    const auto at = [&](int i, int j, int k) { return classify_face(g, g.index(i, j, k)); };

    // (-1.8, 0, 0) front; (0, 0.8, 0) lateral; (0,0,0) interior
    CHECK(at(0, 8, 8) == FaceClass::S1Front);
    CHECK(at(18, 16, 8) == FaceClass::S3Lateral);
    CHECK_FALSE(at(18, 8, 8).has_value());

    // edge/corner ownership: S1 > S2 > S3
    CHECK(at(0, 0, 0) == FaceClass::S1Front);
    CHECK(at(36, 0, 16) == FaceClass::S2Back);
    CHECK(at(5, 0, 0) == FaceClass::S3Lateral);

    CHECK_THROWS_AS(classify_face(g, g.count()), IndexOutOfRange);
}

TEST_CASE("boundary classification partitions the boundary") {
    const Grid3 g = build_grid(kOuter, 0.1);
    std::size_t s1 = 0, s2 = 0, s3 = 0, interior = 0;
    for (std::size_t idx = 0; idx < g.count(); ++idx) {
        const auto tag = classify_face(g, idx);
        const auto ijk = g.unpack(idx);
        const bool boundary = g.on_boundary(ijk[0], ijk[1], ijk[2]);
        CHECK(tag.has_value() == boundary);
        if (!tag) {
            ++interior;
            continue;
        }
        switch (*tag) {
            case FaceClass::S1Front: ++s1; break;
            case FaceClass::S2Back: ++s2; break;
            case FaceClass::S3Lateral: ++s3; break;
        }
    }
    CHECK(s1 == 17u * 17u);
    CHECK(s2 == 17u * 17u);
    CHECK(s1 + s2 + s3 + interior == g.count());
    CHECK(front_face_nodes(g).size() == s1);
}

TEST_CASE("node coordinate round-trip") {
    const Grid3 g = build_grid(kOuter, 0.1);
    for (std::size_t idx = 0; idx < g.count(); ++idx) {
        const auto ijk = g.unpack(idx);
        const auto back = g.nearest(g.coords(idx));
        CHECK(back == ijk);
    }
}

TEST_CASE("build_mask counts and containment") {
    const Grid3 g = build_grid(kOuter, 0.1);
    const RegionMask mask = build_mask(g, kInner);
    CHECK(mask.count() == 33u * 13u * 13u); // 5577

    CHECK_THROWS_AS(build_mask(g, kOuter), InnerNotContained);

    const RegionMask single = build_mask(g, Box3{{0, 0, 0}, {0, 0, 0}});
    CHECK(single.count() == 1);
    CHECK(single.nodes[0] == g.index(18, 8, 8));
}

TEST_CASE("mask count is monotone in inner volume") {
    const Grid3 g = build_grid(kOuter, 0.1);
    std::size_t prev = 0;
    for (int s = 1; s <= 5; ++s) {
        const double r = 0.1 * s;
        const RegionMask m = build_mask(g, Box3{{-r, -r, -r}, {r, r, r}});
        CHECK(m.count() >= prev);
        prev = m.count();
    }
}
