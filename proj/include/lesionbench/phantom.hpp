#pragma once

// Deterministic synthetic label volumes: ellipsoid/box anatomy regions,
// spherical lesions, and seeded perturbations that emulate an imperfect
// rater or method (drop / dilate / erode / jitter / spurious components).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "lesionbench/errors.hpp"
#include "lesionbench/lesions.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

/// Counter-based generator: draw i is SplitMix64's finalizer applied to
/// seed + (i+1) * 0x9E3779B97F4A7C15. Stateless, so any draw is addressable
/// by index and the stream is identical on every platform and language.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t at(std::uint64_t index) const {
        return mix(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
    }

    /// uniform in [0, 1), 53-bit mantissa
    double uniform01(std::uint64_t index) const {
        return static_cast<double>(at(index) >> 11) * 0x1.0p-53;
    }

    /// uniform integer in [lo, hi] inclusive
    int uniform_int(std::uint64_t index, int lo, int hi) const {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(at(index) % span);
    }
};

struct LesionBlob {
    std::array<double, 3> center_vox{0, 0, 0};
    double radius_mm = 2.0;
    int label = 1;
};

struct AnatomyRegion {
    enum class Kind { Ellipsoid, Box };
    Kind kind = Kind::Ellipsoid;
    std::array<double, 3> center_vox{0, 0, 0};
    std::array<double, 3> half_extent_mm{1, 1, 1};  // radii for ellipsoids
    int label = 2;
};

struct PhantomSpec {
    std::array<int, 3> dims{32, 32, 32};
    std::array<double, 3> spacing{1, 1, 1};
    std::uint64_t seed = 0;
    std::vector<LesionBlob> lesions;
    std::vector<AnatomyRegion> anatomy;
    LabelMap label_map;
};

struct PerturbSpec {
    std::uint64_t seed = 0;
    double dilate_prob = 0;
    double erode_prob = 0;
    double drop_prob = 0;  // delete whole lesions
    int add_fp = 0;        // spurious lesions to inject into background
    int jitter_vox = 0;    // per-axis shift in [-jitter_vox, jitter_vox]
    int fp_label = 1;
    double fp_radius_mm = 2.0;
    std::vector<int> labels;  // restrict to these labels; empty = all nonzero

    void validate() const {
        for (double p : {dilate_prob, erode_prob, drop_prob})
            if (!(p >= 0 && p <= 1)) throw InvalidArgumentError("perturb probability outside [0,1]");
        if (add_fp < 0 || jitter_vox < 0)
            throw InvalidArgumentError("perturb counts must be nonnegative");
    }
};

namespace detail {

inline void paint_ellipsoid(LabelVolume& vol, const std::array<double, 3>& center,
                            const std::array<double, 3>& radii_mm, int label, bool box) {
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
        const double r_vox = radii_mm[a] / vol.spacing[a];
        lo[a] = static_cast<int>(std::floor(center[a] - r_vox));
        hi[a] = static_cast<int>(std::ceil(center[a] + r_vox));
        if (lo[a] < 0 || hi[a] >= vol.dims[a])
            throw InvalidArgumentError("phantom region extends outside the volume");
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int i = lo[0]; i <= hi[0]; ++i) {
                bool in;
                if (box) {
                    in = std::abs((i - center[0]) * vol.spacing[0]) <= radii_mm[0] &&
                         std::abs((j - center[1]) * vol.spacing[1]) <= radii_mm[1] &&
                         std::abs((k - center[2]) * vol.spacing[2]) <= radii_mm[2];
                } else {
                    const double dx = (i - center[0]) * vol.spacing[0] / radii_mm[0];
                    const double dy = (j - center[1]) * vol.spacing[1] / radii_mm[1];
                    const double dz = (k - center[2]) * vol.spacing[2] / radii_mm[2];
                    in = dx * dx + dy * dy + dz * dz <= 1.0;
                }
                if (in) vol.at(i, j, k) = label;
            }
}

}  // namespace detail

/// Paints anatomy regions first, then lesions; later entries overwrite
/// earlier ones. Deterministic for a fixed spec.
inline LabelVolume generate_phantom(const PhantomSpec& spec) {
    LabelVolume vol = LabelVolume::create(spec.dims, spec.spacing, spec.label_map);
    for (const AnatomyRegion& region : spec.anatomy)
        detail::paint_ellipsoid(vol, region.center_vox, region.half_extent_mm, region.label,
                                region.kind == AnatomyRegion::Kind::Box);
    for (const LesionBlob& blob : spec.lesions)
        detail::paint_ellipsoid(vol, blob.center_vox,
                                {blob.radius_mm, blob.radius_mm, blob.radius_mm}, blob.label,
                                false);
    for (std::int32_t l : vol.labels)
        if (l != 0 && !vol.label_map.count(l)) vol.label_map[l] = "label_" + std::to_string(l);
    return vol;
}

/// Applies drop / dilate / erode / jitter independently per connected
/// component, then injects add_fp spurious components into background.
/// Draw indices are fixed per lesion (8 draws each), so outputs depend only
/// on (volume, spec).
inline LabelVolume perturb(const LabelVolume& vol, const PerturbSpec& spec) {
    spec.validate();
    const CounterRng rng{spec.seed};
    const auto offsets = neighbor_offsets(Connectivity::FaceEdge18);

    std::set<int> wanted(spec.labels.begin(), spec.labels.end());
    std::set<int> present;
    for (std::int32_t l : vol.labels)
        if (l != 0 && (wanted.empty() || wanted.count(l))) present.insert(l);

    LabelVolume out = vol;
    // untouched labels stay; perturbed labels are re-rendered from scratch
    for (std::size_t i = 0; i < out.labels.size(); ++i)
        if (out.labels[i] != 0 && present.count(out.labels[i])) out.labels[i] = 0;

    std::uint64_t lesion_counter = 0;
    for (int label : present) {
        const LesionSet set = extract_lesions(vol, label, 0.0, Connectivity::FaceEdge18);
        for (const Lesion& lesion : set.lesions) {
            const std::uint64_t base = lesion_counter * 8;
            ++lesion_counter;

            if (rng.uniform01(base + 0) < spec.drop_prob) continue;

            std::set<std::array<int, 3>> voxels(lesion.voxels.begin(), lesion.voxels.end());

            if (spec.dilate_prob > 0 && rng.uniform01(base + 1) < spec.dilate_prob) {
                std::set<std::array<int, 3>> grown = voxels;
                for (const auto& v : voxels)
                    for (const auto& [dx, dy, dz] : offsets) {
                        const std::array<int, 3> w{v[0] + dx, v[1] + dy, v[2] + dz};
                        if (vol.in_bounds(w[0], w[1], w[2])) grown.insert(w);
                    }
                voxels = std::move(grown);
            }

            if (spec.erode_prob > 0 && rng.uniform01(base + 2) < spec.erode_prob) {
                std::set<std::array<int, 3>> kept;
                for (const auto& v : voxels) {
                    bool interior = true;
                    for (const auto& [dx, dy, dz] : offsets) {
                        const std::array<int, 3> w{v[0] + dx, v[1] + dy, v[2] + dz};
                        if (!vol.in_bounds(w[0], w[1], w[2]) || !voxels.count(w)) {
                            interior = false;
                            break;
                        }
                    }
                    if (interior) kept.insert(v);
                }
                voxels = std::move(kept);
            }

            std::array<int, 3> shift{0, 0, 0};
            if (spec.jitter_vox > 0)
                for (int a = 0; a < 3; ++a)
                    shift[a] = rng.uniform_int(base + 3 + static_cast<std::uint64_t>(a),
                                               -spec.jitter_vox, spec.jitter_vox);

            for (const auto& v : voxels) {
                const int i = v[0] + shift[0], j = v[1] + shift[1], k = v[2] + shift[2];
                if (out.in_bounds(i, j, k)) out.at(i, j, k) = label;
            }
        }
    }

    // spurious components: rejection-sampled spheres separated from all
    // existing foreground by at least one voxel
    const std::uint64_t fp_base = lesion_counter * 8;
    int placed = 0;
    const int r_vox_max = static_cast<int>(std::ceil(
        spec.fp_radius_mm / std::min({out.spacing[0], out.spacing[1], out.spacing[2]})));
    for (std::uint64_t attempt = 0; placed < spec.add_fp && attempt < 1000; ++attempt) {
        const std::uint64_t b = fp_base + attempt * 4;
        std::array<double, 3> center{};
        bool fits = true;
        for (int a = 0; a < 3; ++a) {
            const int margin = r_vox_max + 1;
            if (out.dims[a] <= 2 * margin) {
                fits = false;
                break;
            }
            center[a] = rng.uniform_int(b + static_cast<std::uint64_t>(a), margin,
                                        out.dims[a] - 1 - margin);
        }
        if (!fits) break;

        // candidate voxel set plus a one-voxel Chebyshev guard ring
        std::vector<std::array<int, 3>> ball;
        bool clear = true;
        const int ci = static_cast<int>(center[0]), cj = static_cast<int>(center[1]),
                  ck = static_cast<int>(center[2]);
        for (int dk = -r_vox_max - 1; dk <= r_vox_max + 1 && clear; ++dk)
            for (int dj = -r_vox_max - 1; dj <= r_vox_max + 1 && clear; ++dj)
                for (int di = -r_vox_max - 1; di <= r_vox_max + 1 && clear; ++di) {
                    const int i = ci + di, j = cj + dj, k = ck + dk;
                    const double dx = di * out.spacing[0], dy = dj * out.spacing[1],
                                 dz = dk * out.spacing[2];
                    const bool inside =
                        dx * dx + dy * dy + dz * dz <= spec.fp_radius_mm * spec.fp_radius_mm;
                    if (out.in_bounds(i, j, k) && out.at(i, j, k) != 0)
                        clear = false;  // guard ring keeps the new component separate
                    else if (inside)
                        ball.push_back({i, j, k});
                }
        if (!clear || ball.empty()) continue;
        for (const auto& v : ball) out.at(v[0], v[1], v[2]) = spec.fp_label;
        ++placed;
    }

    if (spec.fp_label != 0 && !out.label_map.count(spec.fp_label) && placed > 0)
        out.label_map[spec.fp_label] = "label_" + std::to_string(spec.fp_label);
    return out;
}

}  // namespace lesionbench
