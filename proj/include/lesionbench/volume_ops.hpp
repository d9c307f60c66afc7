#pragma once

// In-memory volume algebra: intensity standardization against a brain mask,
// resampling onto an isotropic working grid, sagittal flips, axis
// permutations, and mask application. All operations are pure; inputs are
// never modified.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "lesionbench/errors.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

namespace detail {

template <typename A, typename B>
void check_same_dims(const A& a, const B& b, const char* what) {
    if (a.dims != b.dims) throw DimsMismatchError(std::string(what) + ": volume dims differ");
}

}  // namespace detail

/// (v - mean) / stddev with the moments taken inside the mask only; the
/// transform is applied to every voxel. Population (1/N) standard deviation.
/// Multi-channel inputs are standardized per channel.
inline ScalarVolume standardize_intensities(const ScalarVolume& image, const BrainMask& mask) {
    detail::check_same_dims(image, mask, "standardize_intensities");
    const std::size_t n = image.voxel_count();
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n; ++i) inside += (mask.inside[i] != 0);
    if (inside == 0) throw InvalidArgumentError("standardize_intensities: mask is empty");

    ScalarVolume out = image;
    for (int c = 0; c < image.channels; ++c) {
        const std::size_t base = n * static_cast<std::size_t>(c);
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask.inside[i]) sum += image.values[base + i];
        const double mean = sum / static_cast<double>(inside);

        double ss = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask.inside[i]) {
                const double d = image.values[base + i] - mean;
                ss += d * d;
            }
        const double stddev = std::sqrt(ss / static_cast<double>(inside));
        if (stddev <= 0)
            throw ZeroVarianceError("standardize_intensities: constant image inside mask");

        for (std::size_t i = 0; i < n; ++i)
            out.values[base + i] = (image.values[base + i] - mean) / stddev;
    }
    return out;
}

namespace detail {

struct ResampleGrid {
    std::array<int, 3> dims;
    Affine affine;  // diag(target) anchored at the bounding-box corner
};

// Output grid covers the world-space bounding box of the input's physical
// extent (the affine image of the index box [-0.5, dims-0.5]^3), anchored at
// the minimum corner, with voxel centers at corner + (m + 0.5) * target.
template <typename V>
ResampleGrid plan_resample(const V& vol, const std::array<double, 3>& target) {
    if (!(target[0] > 0) || !(target[1] > 0) || !(target[2] > 0))
        throw InvalidArgumentError("resample target spacing must be positive");
    if (std::abs(vol.affine.det3()) < 1e-12)
        throw DegenerateAffineError("resample: input affine is singular");

    std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (int corner = 0; corner < 8; ++corner) {
        const double x = (corner & 1) ? vol.dims[0] - 0.5 : -0.5;
        const double y = (corner & 2) ? vol.dims[1] - 0.5 : -0.5;
        const double z = (corner & 4) ? vol.dims[2] - 0.5 : -0.5;
        const auto w = vol.affine.apply(x, y, z);
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], w[a]);
            hi[a] = std::max(hi[a], w[a]);
        }
    }

    ResampleGrid grid;
    std::array<double, 3> origin{};
    for (int a = 0; a < 3; ++a) {
        const double extent = hi[a] - lo[a];
        grid.dims[a] = std::max(1, static_cast<int>(std::ceil(extent / target[a] - 1e-6)));
        origin[a] = lo[a] + 0.5 * target[a];
    }
    grid.affine = Affine::diagonal(target, origin);
    return grid;
}

// Trilinear sample at a continuous input index. Points beyond the half-voxel
// physical boundary return `fill`; inside the boundary margin the edge cell
// extrapolates linearly, which keeps degree-1 fields exact on the whole grid.
inline double sample_trilinear(const ScalarVolume& vol, int channel, double x, double y,
                               double z, double fill) {
    const auto& d = vol.dims;
    if (x < -0.5 || y < -0.5 || z < -0.5 || x > d[0] - 0.5 || y > d[1] - 0.5 || z > d[2] - 0.5)
        return fill;

    const int i0 = std::clamp(static_cast<int>(std::floor(x)), 0, std::max(0, d[0] - 2));
    const int j0 = std::clamp(static_cast<int>(std::floor(y)), 0, std::max(0, d[1] - 2));
    const int k0 = std::clamp(static_cast<int>(std::floor(z)), 0, std::max(0, d[2] - 2));
    const double fx = d[0] > 1 ? x - i0 : 0.0;
    const double fy = d[1] > 1 ? y - j0 : 0.0;
    const double fz = d[2] > 1 ? z - k0 : 0.0;
    const int i1 = d[0] > 1 ? i0 + 1 : i0;
    const int j1 = d[1] > 1 ? j0 + 1 : j0;
    const int k1 = d[2] > 1 ? k0 + 1 : k0;

    const double c000 = vol.at(i0, j0, k0, channel), c100 = vol.at(i1, j0, k0, channel);
    const double c010 = vol.at(i0, j1, k0, channel), c110 = vol.at(i1, j1, k0, channel);
    const double c001 = vol.at(i0, j0, k1, channel), c101 = vol.at(i1, j0, k1, channel);
    const double c011 = vol.at(i0, j1, k1, channel), c111 = vol.at(i1, j1, k1, channel);

    const double c00 = c000 + (c100 - c000) * fx;
    const double c10 = c010 + (c110 - c010) * fx;
    const double c01 = c001 + (c101 - c001) * fx;
    const double c11 = c011 + (c111 - c011) * fx;
    const double c0 = c00 + (c10 - c00) * fy;
    const double c1 = c01 + (c11 - c01) * fy;
    return c0 + (c1 - c0) * fz;
}

}  // namespace detail

/// Nearest-neighbor resample onto an isotropic grid (labels must not blend).
inline LabelVolume resample_to_isovoxel(const LabelVolume& vol,
                                        const std::array<double, 3>& target = {1, 1, 1}) {
    const auto grid = detail::plan_resample(vol, target);
    const Affine to_input = vol.affine.inverse() * grid.affine;

    LabelVolume out;
    out.dims = grid.dims;
    out.spacing = target;
    out.affine = grid.affine;
    out.label_map = vol.label_map;
    out.labels.assign(detail::grid_size(grid.dims), 0);

    std::size_t idx = 0;
    for (int k = 0; k < grid.dims[2]; ++k)
        for (int j = 0; j < grid.dims[1]; ++j)
            for (int i = 0; i < grid.dims[0]; ++i, ++idx) {
                const auto q = to_input.apply(i, j, k);
                const int si = static_cast<int>(std::lround(q[0]));
                const int sj = static_cast<int>(std::lround(q[1]));
                const int sk = static_cast<int>(std::lround(q[2]));
                if (vol.in_bounds(si, sj, sk)) out.labels[idx] = vol.at(si, sj, sk);
            }
    return out;
}

/// Trilinear resample onto an isotropic grid; out-of-extent samples are 0.
inline ScalarVolume resample_to_isovoxel(const ScalarVolume& vol,
                                         const std::array<double, 3>& target = {1, 1, 1}) {
    const auto grid = detail::plan_resample(vol, target);
    const Affine to_input = vol.affine.inverse() * grid.affine;

    ScalarVolume out = ScalarVolume::create(grid.dims, target, vol.channels);
    out.affine = grid.affine;

    for (int c = 0; c < vol.channels; ++c) {
        std::size_t idx = out.index(0, 0, 0, c);
        for (int k = 0; k < grid.dims[2]; ++k)
            for (int j = 0; j < grid.dims[1]; ++j)
                for (int i = 0; i < grid.dims[0]; ++i, ++idx) {
                    const auto q = to_input.apply(i, j, k);
                    out.values[idx] = detail::sample_trilinear(vol, c, q[0], q[1], q[2], 0.0);
                }
    }
    return out;
}

inline BrainMask resample_to_isovoxel(const BrainMask& mask,
                                      const std::array<double, 3>& target = {1, 1, 1}) {
    LabelVolume tmp;
    tmp.dims = mask.dims;
    tmp.spacing = mask.spacing;
    tmp.affine = mask.affine;
    tmp.labels.assign(mask.inside.begin(), mask.inside.end());
    const LabelVolume res = resample_to_isovoxel(tmp, target);
    BrainMask out;
    out.dims = res.dims;
    out.spacing = res.spacing;
    out.affine = res.affine;
    out.inside.assign(res.labels.begin(), res.labels.end());
    return out;
}

namespace detail {

// new index i' reads old index (nx-1-i', j, k); the affine compensates so
// every sample keeps its world position
inline Affine flipped_affine(const Affine& a, int nx) {
    Affine flip = Affine::identity();
    flip.at(0, 0) = -1;
    flip.at(0, 3) = nx - 1;
    return a * flip;
}

}  // namespace detail

/// Mirror along the first (left-right) axis. An involution.
inline LabelVolume flip_sagittal(const LabelVolume& vol) {
    LabelVolume out = vol;
    const int nx = vol.dims[0];
    for (int k = 0; k < vol.dims[2]; ++k)
        for (int j = 0; j < vol.dims[1]; ++j)
            for (int i = 0; i < nx; ++i) out.at(i, j, k) = vol.at(nx - 1 - i, j, k);
    out.affine = detail::flipped_affine(vol.affine, nx);
    return out;
}

inline ScalarVolume flip_sagittal(const ScalarVolume& vol) {
    ScalarVolume out = vol;
    const int nx = vol.dims[0];
    for (int c = 0; c < vol.channels; ++c)
        for (int k = 0; k < vol.dims[2]; ++k)
            for (int j = 0; j < vol.dims[1]; ++j)
                for (int i = 0; i < nx; ++i) out.at(i, j, k, c) = vol.at(nx - 1 - i, j, k, c);
    out.affine = detail::flipped_affine(vol.affine, nx);
    return out;
}

inline BrainMask flip_sagittal(const BrainMask& mask) {
    BrainMask out = mask;
    const int nx = mask.dims[0];
    for (int k = 0; k < mask.dims[2]; ++k)
        for (int j = 0; j < mask.dims[1]; ++j)
            for (int i = 0; i < nx; ++i)
                out.inside[out.index(i, j, k)] = mask.inside[mask.index(nx - 1 - i, j, k)];
    out.affine = detail::flipped_affine(mask.affine, nx);
    return out;
}

/// Reorder axes so that output axis a reads input axis perm[a]; the affine is
/// updated to keep world positions fixed. perm must be a permutation of 0,1,2.
inline ScalarVolume permute_axes(const ScalarVolume& vol, const std::array<int, 3>& perm) {
    std::array<bool, 3> seen{false, false, false};
    for (int a : perm) {
        if (a < 0 || a > 2 || seen[a]) throw InvalidArgumentError("permute_axes: bad permutation");
        seen[a] = true;
    }
    ScalarVolume out;
    out.dims = {vol.dims[perm[0]], vol.dims[perm[1]], vol.dims[perm[2]]};
    out.spacing = {vol.spacing[perm[0]], vol.spacing[perm[1]], vol.spacing[perm[2]]};
    out.channels = vol.channels;
    out.values.resize(vol.values.size());

    Affine p{};  // maps new index -> old index
    for (int a = 0; a < 3; ++a) p.at(perm[a], a) = 1;
    p.at(3, 3) = 1;
    out.affine = vol.affine * p;

    std::array<int, 3> oidx{};
    for (int c = 0; c < vol.channels; ++c)
        for (int k = 0; k < out.dims[2]; ++k)
            for (int j = 0; j < out.dims[1]; ++j)
                for (int i = 0; i < out.dims[0]; ++i) {
                    const std::array<int, 3> nidx{i, j, k};
                    for (int a = 0; a < 3; ++a) oidx[perm[a]] = nidx[a];
                    out.at(i, j, k, c) = vol.at(oidx[0], oidx[1], oidx[2], c);
                }
    return out;
}

/// Replace values outside the mask with `fill`; inside is untouched.
inline ScalarVolume apply_mask(const ScalarVolume& vol, const BrainMask& mask, double fill = 0.0) {
    detail::check_same_dims(vol, mask, "apply_mask");
    ScalarVolume out = vol;
    const std::size_t n = vol.voxel_count();
    for (int c = 0; c < vol.channels; ++c) {
        const std::size_t base = n * static_cast<std::size_t>(c);
        for (std::size_t i = 0; i < n; ++i)
            if (!mask.inside[i]) out.values[base + i] = fill;
    }
    return out;
}

}  // namespace lesionbench
