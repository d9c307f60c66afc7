#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lesionbench/affine.hpp"
#include "lesionbench/errors.hpp"

namespace lesionbench {

/// label id -> structure name (0 = background, never listed)
using LabelMap = std::map<int, std::string>;

namespace detail {

inline std::size_t grid_size(const std::array<int, 3>& dims) {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
}

inline void check_dims_positive(const std::array<int, 3>& dims) {
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
        throw InvalidArgumentError("volume dims must each be >= 1");
}

inline void check_spacing_positive(const std::array<double, 3>& spacing) {
    if (!(spacing[0] > 0) || !(spacing[1] > 0) || !(spacing[2] > 0))
        throw InvalidArgumentError("voxel spacing must be positive on all axes");
}

// spacing entries must match affine column norms within 1e-3 relative
inline bool spacing_matches_affine(const std::array<double, 3>& spacing, const Affine& affine) {
    for (int j = 0; j < 3; ++j) {
        const double n = affine.column_norm(j);
        if (std::abs(n - spacing[j]) > 1e-3 * std::max(std::abs(spacing[j]), 1e-12)) return false;
    }
    return true;
}

}  // namespace detail

/// 3D integer label grid. First axis fastest-varying.
struct LabelVolume {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1, 1, 1};
    Affine affine = Affine::identity();
    std::vector<std::int32_t> labels;
    LabelMap label_map;

    static LabelVolume create(const std::array<int, 3>& dims,
                              const std::array<double, 3>& spacing = {1, 1, 1},
                              LabelMap label_map = {}) {
        detail::check_dims_positive(dims);
        detail::check_spacing_positive(spacing);
        LabelVolume v;
        v.dims = dims;
        v.spacing = spacing;
        v.affine = Affine::diagonal(spacing);
        v.labels.assign(detail::grid_size(dims), 0);
        v.label_map = std::move(label_map);
        return v;
    }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
    }

    std::int32_t at(int i, int j, int k) const { return labels[index(i, j, k)]; }
    std::int32_t& at(int i, int j, int k) { return labels[index(i, j, k)]; }

    bool in_bounds(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
    }

    std::size_t voxel_count() const { return labels.size(); }

    void validate() const {
        detail::check_dims_positive(dims);
        detail::check_spacing_positive(spacing);
        if (labels.size() != detail::grid_size(dims))
            throw InvalidArgumentError("label grid size does not match dims");
        if (!detail::spacing_matches_affine(spacing, affine))
            throw InvalidArgumentError("spacing does not match affine column norms");
    }
};

/// 3D real-valued grid, optionally multi-channel (channel is the slowest axis).
struct ScalarVolume {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1, 1, 1};
    Affine affine = Affine::identity();
    int channels = 1;
    std::vector<double> values;

    static ScalarVolume create(const std::array<int, 3>& dims,
                               const std::array<double, 3>& spacing = {1, 1, 1},
                               int channels = 1) {
        detail::check_dims_positive(dims);
        detail::check_spacing_positive(spacing);
        if (channels < 1) throw InvalidArgumentError("channels must be >= 1");
        ScalarVolume v;
        v.dims = dims;
        v.spacing = spacing;
        v.affine = Affine::diagonal(spacing);
        v.channels = channels;
        v.values.assign(detail::grid_size(dims) * static_cast<std::size_t>(channels), 0.0);
        return v;
    }

    std::size_t index(int i, int j, int k, int c = 0) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(dims[1]) *
                        (static_cast<std::size_t>(k) +
                         static_cast<std::size_t>(dims[2]) * static_cast<std::size_t>(c)));
    }

    double at(int i, int j, int k, int c = 0) const { return values[index(i, j, k, c)]; }
    double& at(int i, int j, int k, int c = 0) { return values[index(i, j, k, c)]; }

    std::size_t voxel_count() const { return detail::grid_size(dims); }

    void validate() const {
        detail::check_dims_positive(dims);
        detail::check_spacing_positive(spacing);
        if (channels < 1) throw InvalidArgumentError("channels must be >= 1");
        if (values.size() != voxel_count() * static_cast<std::size_t>(channels))
            throw InvalidArgumentError("value grid size does not match dims x channels");
        for (double v : values)
            if (!std::isfinite(v)) throw InvalidArgumentError("scalar volume holds non-finite value");
        if (!detail::spacing_matches_affine(spacing, affine))
            throw InvalidArgumentError("spacing does not match affine column norms");
    }
};

/// Multi-channel stack of raw classifier logits; channel 0 is background.
/// Same storage as ScalarVolume, fusion operations require channels >= 2.
using LogitStack = ScalarVolume;

/// Binary inside/outside grid sharing the geometry of the volumes it masks.
struct BrainMask {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1, 1, 1};
    Affine affine = Affine::identity();
    std::vector<std::uint8_t> inside;

    static BrainMask create(const std::array<int, 3>& dims,
                            const std::array<double, 3>& spacing = {1, 1, 1}, bool fill = false) {
        detail::check_dims_positive(dims);
        detail::check_spacing_positive(spacing);
        BrainMask m;
        m.dims = dims;
        m.spacing = spacing;
        m.affine = Affine::diagonal(spacing);
        m.inside.assign(detail::grid_size(dims), fill ? 1u : 0u);
        return m;
    }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
    }

    bool at(int i, int j, int k) const { return inside[index(i, j, k)] != 0; }
    void set(int i, int j, int k, bool v) { inside[index(i, j, k)] = v ? 1u : 0u; }

    std::size_t count_inside() const {
        std::size_t n = 0;
        for (auto b : inside) n += (b != 0);
        return n;
    }
};

}  // namespace lesionbench
