#include <catch2/catch_amalgamated.hpp>

#include "lesionbench/affine.hpp"
#include "lesionbench/volume.hpp"

using namespace lesionbench;

TEST_CASE("identity affine maps indices to themselves", "[affine]") {
    const Affine a = Affine::identity();
    const auto p = a.apply(3, 4, 5);
    CHECK(p[0] == 3.0);
    CHECK(p[1] == 4.0);
    CHECK(p[2] == 5.0);
}

TEST_CASE("diagonal affine scales and translates", "[affine]") {
    const Affine a = Affine::diagonal({2, 3, 4}, {10, 20, 30});
    const auto p = a.apply(1, 1, 1);
    CHECK(p[0] == 12.0);
    CHECK(p[1] == 23.0);
    CHECK(p[2] == 34.0);
    CHECK(a.column_norm(0) == 2.0);
    CHECK(a.column_norm(2) == 4.0);
}

TEST_CASE("inverse round-trips points", "[affine]") {
    Affine a = Affine::diagonal({0.5, 2.0, 1.1}, {-4, 7, 0.3});
    a.at(0, 1) = 0.2;  // shear
    const Affine inv = a.inverse();
    const auto p = a.apply(3, -2, 5);
    const auto q = inv.apply(p);
    CHECK(q[0] == Catch::Approx(3).margin(1e-12));
    CHECK(q[1] == Catch::Approx(-2).margin(1e-12));
    CHECK(q[2] == Catch::Approx(5).margin(1e-12));
}

TEST_CASE("singular affine has no inverse", "[affine]") {
    Affine a = Affine::identity();
    a.at(1, 1) = 0;
    CHECK_THROWS_AS(a.inverse(), DegenerateAffineError);
}

TEST_CASE("affine product composes", "[affine]") {
    const Affine a = Affine::diagonal({2, 2, 2});
    const Affine b = Affine::diagonal({1, 1, 1}, {5, 5, 5});
    const auto p = (a * b).apply(1, 0, 0);  // b first, then a
    CHECK(p[0] == 12.0);
    CHECK(p[1] == 10.0);
}

TEST_CASE("label volume indexing is x-fastest", "[volume]") {
    LabelVolume v = LabelVolume::create({2, 3, 4});
    CHECK(v.index(1, 0, 0) == 1);
    CHECK(v.index(0, 1, 0) == 2);
    CHECK(v.index(0, 0, 1) == 6);
    v.at(1, 2, 3) = 9;
    CHECK(v.labels[1 + 2 * (2 + 3 * 3)] == 9);
}

TEST_CASE("volume construction validates dims and spacing", "[volume]") {
    CHECK_THROWS_AS(LabelVolume::create({0, 1, 1}), InvalidArgumentError);
    CHECK_THROWS_AS(LabelVolume::create({1, 1, 1}, {1, 0, 1}), InvalidArgumentError);
    CHECK_THROWS_AS(ScalarVolume::create({2, 2, 2}, {1, 1, 1}, 0), InvalidArgumentError);
}

TEST_CASE("validate checks spacing against affine column norms", "[volume]") {
    LabelVolume v = LabelVolume::create({2, 2, 2}, {1, 1, 1});
    v.validate();
    v.spacing = {2, 1, 1};  // affine still says 1mm
    CHECK_THROWS_AS(v.validate(), InvalidArgumentError);
}

TEST_CASE("scalar volume channels occupy the slowest axis", "[volume]") {
    ScalarVolume v = ScalarVolume::create({2, 2, 2}, {1, 1, 1}, 3);
    CHECK(v.values.size() == 24);
    CHECK(v.index(0, 0, 0, 1) == 8);
    v.at(1, 1, 1, 2) = 5.0;
    CHECK(v.values[23] == 5.0);
}

TEST_CASE("brain mask counts inside voxels", "[volume]") {
    BrainMask m = BrainMask::create({2, 2, 1});
    CHECK(m.count_inside() == 0);
    m.set(0, 1, 0, true);
    CHECK(m.count_inside() == 1);
    CHECK(m.at(0, 1, 0));
}
