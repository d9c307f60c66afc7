#include <catch2/catch_amalgamated.hpp>

#include "lesionbench/volume_ops.hpp"
#include "oracles.hpp"

using namespace lesionbench;

namespace {

BrainMask full_mask(const std::array<int, 3>& dims) {
    return BrainMask::create(dims, {1, 1, 1}, true);
}

}  // namespace

// ---- standardize_intensities -------------------------------------------------

TEST_CASE("two-voxel mask {1,3} standardizes to {-1,+1}", "[ops]") {
    ScalarVolume img = ScalarVolume::create({2, 1, 1});
    img.at(0, 0, 0) = 1;
    img.at(1, 0, 0) = 3;
    // independent two-pass oracle: mean 2, population std 1
    const auto [mean, stddev] = oracle::mean_std({1, 3});
    REQUIRE(mean == 2.0);
    REQUIRE(stddev == 1.0);

    const ScalarVolume out = standardize_intensities(img, full_mask({2, 1, 1}));
    CHECK(out.at(0, 0, 0) == -1.0);
    CHECK(out.at(1, 0, 0) == 1.0);
}

TEST_CASE("standardization is idempotent on a fixed point", "[ops]") {
    oracle::TestRng rng(31);
    ScalarVolume img = ScalarVolume::create({4, 4, 4});
    for (double& v : img.values) v = rng.next_unit() * 9 - 4;
    const BrainMask mask = full_mask({4, 4, 4});

    const ScalarVolume once = standardize_intensities(img, mask);
    const ScalarVolume twice = standardize_intensities(once, mask);
    for (std::size_t i = 0; i < once.values.size(); ++i)
        REQUIRE(twice.values[i] == Catch::Approx(once.values[i]).margin(1e-6));
}

TEST_CASE("constant image inside mask raises zero-variance", "[ops]") {
    ScalarVolume img = ScalarVolume::create({3, 3, 3});
    for (double& v : img.values) v = 5.0;
    CHECK_THROWS_AS(standardize_intensities(img, full_mask({3, 3, 3})), ZeroVarianceError);
}

TEST_CASE("standardization rejects dim mismatch and empty masks", "[ops]") {
    ScalarVolume img = ScalarVolume::create({3, 3, 3});
    CHECK_THROWS_AS(standardize_intensities(img, full_mask({3, 3, 2})), DimsMismatchError);
    CHECK_THROWS_AS(standardize_intensities(img, BrainMask::create({3, 3, 3})),
                    InvalidArgumentError);
}

TEST_CASE("standardization transforms voxels outside the mask too", "[ops]") {
    ScalarVolume img3 = ScalarVolume::create({3, 1, 1});
    img3.at(0, 0, 0) = 1;
    img3.at(1, 0, 0) = 3;
    img3.at(2, 0, 0) = 7;  // outside the mask
    BrainMask mask3 = BrainMask::create({3, 1, 1});
    mask3.set(0, 0, 0, true);
    mask3.set(1, 0, 0, true);
    const ScalarVolume out = standardize_intensities(img3, mask3);
    CHECK(out.at(2, 0, 0) == 5.0);  // (7-2)/1
}

TEST_CASE("standardized output is invariant under affine input rescaling", "[ops]") {
    oracle::TestRng rng(42);
    ScalarVolume img = ScalarVolume::create({5, 4, 3});
    for (double& v : img.values) v = rng.next_unit() * 100;
    const BrainMask mask = full_mask({5, 4, 3});

    ScalarVolume scaled = img;
    for (double& v : scaled.values) v = 3.5 * v - 12.0;

    const ScalarVolume a = standardize_intensities(img, mask);
    const ScalarVolume b = standardize_intensities(scaled, mask);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        REQUIRE(a.values[i] == Catch::Approx(b.values[i]).margin(1e-6));
}

// ---- resample_to_isovoxel ------------------------------------------------------

TEST_CASE("identity resample returns the input grid", "[ops]") {
    oracle::TestRng rng(7);
    ScalarVolume img = ScalarVolume::create({4, 5, 6});
    img.affine = Affine::diagonal({1, 1, 1}, {3, -2, 11});
    for (double& v : img.values) v = rng.next_unit();

    const ScalarVolume out = resample_to_isovoxel(img);
    REQUIRE(out.dims == img.dims);
    CHECK(out.affine.almost_equal(img.affine, 1e-9));
    for (std::size_t i = 0; i < img.values.size(); ++i)
        REQUIRE(out.values[i] == Catch::Approx(img.values[i]).margin(1e-12));
}

TEST_CASE("2mm labels (1,2) resample to 1mm as (1,1,2,2)", "[ops]") {
    LabelVolume vol = LabelVolume::create({2, 1, 1}, {2, 1, 1});
    vol.at(0, 0, 0) = 1;
    vol.at(1, 0, 0) = 2;

    const LabelVolume out = resample_to_isovoxel(vol);
    REQUIRE(out.dims == std::array<int, 3>{4, 1, 1});
    CHECK(out.at(0, 0, 0) == 1);
    CHECK(out.at(1, 0, 0) == 1);
    CHECK(out.at(2, 0, 0) == 2);
    CHECK(out.at(3, 0, 0) == 2);
    CHECK(out.spacing == std::array<double, 3>{1, 1, 1});
}

TEST_CASE("trilinear resample reproduces a linear ramp at all output centers", "[ops]") {
    // ramp in world space; input grid anisotropic and translated
    const std::array<int, 3> dims{7, 5, 4};
    const std::array<double, 3> spacing{1.7, 0.6, 2.2};
    ScalarVolume img = ScalarVolume::create(dims, spacing);
    img.affine = Affine::diagonal(spacing, {-3.0, 4.0, 0.5});
    const auto ramp = [](const std::array<double, 3>& w) {
        return 2.0 * w[0] - 0.75 * w[1] + 0.3 * w[2] + 5.0;
    };
    for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
            for (int i = 0; i < dims[0]; ++i)
                img.at(i, j, k) = ramp(img.affine.apply(i, j, k));

    const ScalarVolume out = resample_to_isovoxel(img);
    for (int k = 0; k < out.dims[2]; ++k)
        for (int j = 0; j < out.dims[1]; ++j)
            for (int i = 0; i < out.dims[0]; ++i)
                REQUIRE(out.at(i, j, k) ==
                        Catch::Approx(ramp(out.affine.apply(i, j, k))).margin(1e-5));
}

TEST_CASE("resampled grid covers the physical extent", "[ops]") {
    LabelVolume vol = LabelVolume::create({10, 6, 4}, {2, 2, 2});
    const LabelVolume out = resample_to_isovoxel(vol);
    CHECK(out.dims == std::array<int, 3>{20, 12, 8});  // dims double at half the spacing
}

TEST_CASE("resample rejects a singular affine", "[ops]") {
    ScalarVolume img = ScalarVolume::create({2, 2, 2});
    img.affine.at(0, 0) = 0;
    CHECK_THROWS_AS(resample_to_isovoxel(img), DegenerateAffineError);
}

TEST_CASE("nearest-neighbor resample preserves labeled volume on spheres", "[ops]") {
    // convex phantom >= 100 voxels: labeled mm^3 within 5% after resampling
    LabelVolume vol = LabelVolume::create({24, 24, 24}, {1.3, 0.9, 1.1});
    const std::array<double, 3> center{12, 12, 12};
    const double radius = 7.0;  // mm
    std::size_t count = 0;
    for (int k = 0; k < 24; ++k)
        for (int j = 0; j < 24; ++j)
            for (int i = 0; i < 24; ++i) {
                const double dx = (i - center[0]) * 1.3, dy = (j - center[1]) * 0.9,
                             dz = (k - center[2]) * 1.1;
                if (dx * dx + dy * dy + dz * dz <= radius * radius) {
                    vol.at(i, j, k) = 1;
                    ++count;
                }
            }
    REQUIRE(count >= 100);
    const double vol_before = static_cast<double>(count) * voxel_volume(vol);

    const LabelVolume out = resample_to_isovoxel(vol);
    std::size_t count_after = 0;
    for (std::int32_t l : out.labels) count_after += (l == 1);
    const double vol_after = static_cast<double>(count_after) * voxel_volume(out);
    CHECK(vol_after == Catch::Approx(vol_before).epsilon(0.05));
}

// ---- flip_sagittal ----------------------------------------------------------------

TEST_CASE("flip twice is the identity", "[ops]") {
    oracle::TestRng rng(11);
    LabelVolume vol = LabelVolume::create({5, 4, 3});
    for (auto& l : vol.labels) l = rng.next_int(0, 3);
    const LabelVolume back = flip_sagittal(flip_sagittal(vol));
    CHECK(back.labels == vol.labels);
    CHECK(back.affine.almost_equal(vol.affine, 1e-12));
}

TEST_CASE("flip reverses the first axis with a compensating affine", "[ops]") {
    LabelVolume vol = LabelVolume::create({2, 1, 1});
    vol.at(0, 0, 0) = 1;
    vol.at(1, 0, 0) = 2;
    const LabelVolume out = flip_sagittal(vol);
    CHECK(out.at(0, 0, 0) == 2);
    CHECK(out.at(1, 0, 0) == 1);
    // hand computation: column 0 negated, translation shifted by (nx-1)
    CHECK(out.affine.at(0, 0) == -1.0);
    CHECK(out.affine.at(0, 3) == 1.0);
}

TEST_CASE("flip preserves world positions of samples", "[ops]") {
    ScalarVolume img = ScalarVolume::create({6, 3, 2});
    img.affine = Affine::diagonal({1, 1, 1}, {5, 6, 7});
    const ScalarVolume out = flip_sagittal(img);
    const auto before = img.affine.apply(0, 0, 0);
    const auto after = out.affine.apply(img.dims[0] - 1, 0, 0);
    for (int a = 0; a < 3; ++a) CHECK(before[a] == Catch::Approx(after[a]).margin(1e-12));
}

TEST_CASE("flip handles multi-channel stacks and masks", "[ops]") {
    ScalarVolume stack = ScalarVolume::create({2, 1, 1}, {1, 1, 1}, 2);
    stack.at(0, 0, 0, 0) = 1;
    stack.at(1, 0, 0, 0) = 2;
    stack.at(0, 0, 0, 1) = 3;
    stack.at(1, 0, 0, 1) = 4;
    const ScalarVolume out = flip_sagittal(stack);
    CHECK(out.at(0, 0, 0, 0) == 2);
    CHECK(out.at(0, 0, 0, 1) == 4);

    BrainMask mask = BrainMask::create({2, 1, 1});
    mask.set(0, 0, 0, true);
    const BrainMask flipped = flip_sagittal(mask);
    CHECK(flipped.at(1, 0, 0));
    CHECK_FALSE(flipped.at(0, 0, 0));
}

// ---- permute_axes ---------------------------------------------------------------

TEST_CASE("axis permutation moves samples and keeps world positions", "[ops]") {
    ScalarVolume img = ScalarVolume::create({2, 3, 4}, {1.0, 2.0, 3.0});
    oracle::TestRng rng(13);
    for (double& v : img.values) v = rng.next_unit();

    const ScalarVolume out = permute_axes(img, {2, 0, 1});
    REQUIRE(out.dims == std::array<int, 3>{4, 2, 3});
    for (int k = 0; k < out.dims[2]; ++k)
        for (int j = 0; j < out.dims[1]; ++j)
            for (int i = 0; i < out.dims[0]; ++i) {
                CHECK(out.at(i, j, k) == img.at(j, k, i));
                const auto w_new = out.affine.apply(i, j, k);
                const auto w_old = img.affine.apply(j, k, i);
                for (int a = 0; a < 3; ++a)
                    REQUIRE(w_new[a] == Catch::Approx(w_old[a]).margin(1e-12));
            }
    CHECK_THROWS_AS(permute_axes(img, {0, 0, 1}), InvalidArgumentError);
}

// ---- apply_mask -------------------------------------------------------------------

TEST_CASE("full mask is the identity, empty mask fills everything", "[ops]") {
    oracle::TestRng rng(17);
    ScalarVolume img = ScalarVolume::create({3, 3, 3});
    for (double& v : img.values) v = rng.next_unit();

    const ScalarVolume same = apply_mask(img, full_mask({3, 3, 3}));
    CHECK(same.values == img.values);

    const ScalarVolume filled = apply_mask(img, BrainMask::create({3, 3, 3}), -7.0);
    for (double v : filled.values) REQUIRE(v == -7.0);
}

TEST_CASE("checkerboard mask spot checks", "[ops]") {
    const std::array<int, 3> dims{4, 4, 4};
    ScalarVolume img = ScalarVolume::create(dims);
    for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = static_cast<double>(i);
    BrainMask mask = BrainMask::create(dims);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) mask.set(i, j, k, (i + j + k) % 2 == 0);

    const ScalarVolume out = apply_mask(img, mask, 0.0);
    // element-wise oracle on 8 voxels
    for (const auto& [x, y, z] : std::vector<std::array<int, 3>>{{0, 0, 0},
                                                                 {1, 0, 0},
                                                                 {2, 1, 0},
                                                                 {3, 3, 3},
                                                                 {1, 1, 0},
                                                                 {2, 2, 2},
                                                                 {0, 3, 2},
                                                                 {3, 0, 1}}) {
        const double expected = ((x + y + z) % 2 == 0) ? img.at(x, y, z) : 0.0;
        REQUIRE(out.at(x, y, z) == expected);
    }
    CHECK_THROWS_AS(apply_mask(img, full_mask({4, 4, 3})), DimsMismatchError);
}
