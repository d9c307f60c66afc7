#pragma once

// Lesion extraction: connected components of one label (or a merged label
// set) under 18-connectivity, filtered by a physical minimum volume.
// Two-pass union-find labeling: raster scan linking each foreground voxel to
// its already-visited neighbors, then relabel through the equivalence table.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lesionbench/errors.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

enum class Connectivity : int {
    Face6 = 6,     // face neighbors only
    FaceEdge18 = 18,  // face + edge neighbors, corners excluded
    Full26 = 26,
};

/// Neighbor offsets for a connectivity class: Chebyshev distance 1 with
/// Manhattan distance <= (1, 2, 3) for 6-, 18-, 26-connectivity.
inline std::vector<std::array<int, 3>> neighbor_offsets(Connectivity conn) {
    const int max_manhattan = conn == Connectivity::Face6 ? 1 : conn == Connectivity::FaceEdge18 ? 2 : 3;
    std::vector<std::array<int, 3>> offsets;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (manhattan == 0 || manhattan > max_manhattan) continue;
                offsets.push_back({dx, dy, dz});
            }
    return offsets;
}

/// One connected component. Voxels are listed in raster order (x fastest).
struct Lesion {
    int id = 0;  // 1-based within the producing LesionSet
    std::vector<std::array<int, 3>> voxels;
    double volume_mm3 = 0;
    std::array<int, 3> bbox_min{0, 0, 0};
    std::array<int, 3> bbox_max{0, 0, 0};
    std::array<double, 3> centroid{0, 0, 0};

    std::size_t size() const { return voxels.size(); }
};

struct LesionSet {
    std::vector<Lesion> lesions;
    std::array<int, 3> source_dims{0, 0, 0};
    std::vector<int> label_ids;
    Connectivity connectivity = Connectivity::FaceEdge18;
    double min_volume_mm3 = 3.0;
    double voxel_volume_mm3 = 1.0;

    std::size_t size() const { return lesions.size(); }
    bool empty() const { return lesions.empty(); }
};

/// Physical volume of one voxel: the product of the spacing entries.
inline double voxel_volume(const std::array<double, 3>& spacing) {
    return spacing[0] * spacing[1] * spacing[2];
}

inline double voxel_volume(const LabelVolume& vol) { return voxel_volume(vol.spacing); }

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];  // path halving
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::uint32_t> parent_;
};

// raster-prior half of the neighbor set: offsets that point at voxels the
// scan has already visited
inline std::vector<std::array<int, 3>> prior_offsets(Connectivity conn) {
    std::vector<std::array<int, 3>> prior;
    for (const auto& o : neighbor_offsets(conn)) {
        const auto [dx, dy, dz] = o;
        if (dz < 0 || (dz == 0 && dy < 0) || (dz == 0 && dy == 0 && dx < 0)) prior.push_back(o);
    }
    return prior;
}

}  // namespace detail

/// Connected components of the binarized mask `grid value in label_ids`,
/// filtered to components of physical volume >= min_volume_mm3. Components
/// are id'd 1..n ordered by (min z, min y, min x) of their bounding boxes.
inline LesionSet extract_lesions(const LabelVolume& vol, const std::vector<int>& label_ids,
                                 double min_volume_mm3 = 3.0,
                                 Connectivity conn = Connectivity::FaceEdge18) {
    LesionSet set;
    set.source_dims = vol.dims;
    set.label_ids = label_ids;
    set.connectivity = conn;
    set.min_volume_mm3 = min_volume_mm3;
    set.voxel_volume_mm3 = voxel_volume(vol);

    const int nx = vol.dims[0], ny = vol.dims[1], nz = vol.dims[2];
    const std::size_t n = vol.voxel_count();

    std::vector<std::uint8_t> fg(n, 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t v = vol.labels[i];
        if (v != 0 && std::find(label_ids.begin(), label_ids.end(), v) != label_ids.end()) {
            fg[i] = 1;
            any = true;
        }
    }
    if (!any) return set;

    const auto prior = detail::prior_offsets(conn);

    // first pass: provisional labels + equivalences
    std::vector<std::uint32_t> cc(n, 0);
    detail::UnionFind uf(n / 2 + 2);
    std::uint32_t next_label = 1;
    std::size_t idx = 0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i, ++idx) {
                if (!fg[idx]) continue;
                std::uint32_t assigned = 0;
                for (const auto& [dx, dy, dz] : prior) {
                    const int pi = i + dx, pj = j + dy, pk = k + dz;
                    if (pi < 0 || pj < 0 || pk < 0 || pi >= nx || pj >= ny || pk >= nz) continue;
                    const std::size_t pidx = vol.index(pi, pj, pk);
                    if (!fg[pidx]) continue;
                    if (assigned == 0)
                        assigned = cc[pidx];
                    else if (cc[pidx] != assigned)
                        uf.unite(assigned, cc[pidx]);
                }
                if (assigned == 0) assigned = next_label++;
                cc[idx] = assigned;
            }

    // second pass: resolve roots, gather voxels per component
    std::vector<std::uint32_t> root_to_comp(next_label, 0);
    std::vector<Lesion> components;
    idx = 0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i, ++idx) {
                if (!fg[idx]) continue;
                const std::uint32_t root = uf.find(cc[idx]);
                std::uint32_t comp = root_to_comp[root];
                if (comp == 0) {
                    components.emplace_back();
                    comp = static_cast<std::uint32_t>(components.size());
                    root_to_comp[root] = comp;
                    components.back().bbox_min = {i, j, k};
                    components.back().bbox_max = {i, j, k};
                }
                Lesion& lesion = components[comp - 1];
                lesion.voxels.push_back({i, j, k});
                for (int a = 0; a < 3; ++a) {
                    const int v = a == 0 ? i : a == 1 ? j : k;
                    lesion.bbox_min[a] = std::min(lesion.bbox_min[a], v);
                    lesion.bbox_max[a] = std::max(lesion.bbox_max[a], v);
                }
            }

    for (Lesion& lesion : components) {
        lesion.volume_mm3 = static_cast<double>(lesion.voxels.size()) * set.voxel_volume_mm3;
        std::array<double, 3> sum{0, 0, 0};
        for (const auto& v : lesion.voxels)
            for (int a = 0; a < 3; ++a) sum[a] += v[a];
        for (int a = 0; a < 3; ++a) lesion.centroid[a] = sum[a] / static_cast<double>(lesion.size());
    }

    components.erase(std::remove_if(components.begin(), components.end(),
                                    [&](const Lesion& l) { return l.volume_mm3 < min_volume_mm3; }),
                     components.end());

    std::sort(components.begin(), components.end(), [](const Lesion& a, const Lesion& b) {
        const auto key = [](const Lesion& l) {
            return std::array<int, 6>{l.bbox_min[2], l.bbox_min[1], l.bbox_min[0],
                                      l.voxels[0][2], l.voxels[0][1], l.voxels[0][0]};
        };
        return key(a) < key(b);
    });
    for (std::size_t i = 0; i < components.size(); ++i) components[i].id = static_cast<int>(i + 1);

    set.lesions = std::move(components);
    return set;
}

inline LesionSet extract_lesions(const LabelVolume& vol, int label_id, double min_volume_mm3 = 3.0,
                                 Connectivity conn = Connectivity::FaceEdge18) {
    return extract_lesions(vol, std::vector<int>{label_id}, min_volume_mm3, conn);
}

/// Rasterize a LesionSet back onto its source grid, voxel -> lesion id
/// (0 where no lesion). Shared helper for overlap counting.
inline std::vector<std::int32_t> lesion_id_grid(const LesionSet& set) {
    const std::size_t n = static_cast<std::size_t>(set.source_dims[0]) * set.source_dims[1] *
                          set.source_dims[2];
    std::vector<std::int32_t> grid(n, 0);
    const std::size_t nx = static_cast<std::size_t>(set.source_dims[0]);
    const std::size_t ny = static_cast<std::size_t>(set.source_dims[1]);
    for (const Lesion& lesion : set.lesions)
        for (const auto& v : lesion.voxels)
            grid[v[0] + nx * (v[1] + ny * v[2])] = lesion.id;
    return grid;
}

}  // namespace lesionbench
