#pragma once

// Voxel-level agreement: Dice = 2|X∩Y| / (|X|+|Y|), reported as a percentage
// by default. Multi-label tables accumulate all per-label counts in one pass
// over the two grids.

#include <cstdint>
#include <map>
#include <vector>

#include "lesionbench/errors.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

enum class DiceUnit { Percent, Fraction };

struct DiceEntry {
    double dice = 0;
    std::uint64_t n_ground = 0;
    std::uint64_t n_pred = 0;
    std::uint64_t n_intersect = 0;
    bool both_empty = false;  // dice is the vacuous-convention value
};

struct DiceTable {
    std::map<int, DiceEntry> per_label;
    DiceUnit unit = DiceUnit::Percent;
};

namespace detail {

inline double dice_value(std::uint64_t ng, std::uint64_t np, std::uint64_t ni, DiceUnit unit) {
    const double full = unit == DiceUnit::Percent ? 100.0 : 1.0;
    if (ng + np == 0) return full;  // both empty
    return full * 2.0 * static_cast<double>(ni) / static_cast<double>(ng + np);
}

}  // namespace detail

/// Dice agreement across the listed labels, one pass over both grids.
inline DiceTable dice_table(const LabelVolume& ground, const LabelVolume& pred,
                            const std::vector<int>& labels, DiceUnit unit = DiceUnit::Percent) {
    if (ground.dims != pred.dims) throw DimsMismatchError("dice_table: volume dims differ");
    if (labels.empty()) throw InvalidArgumentError("dice_table: label list is empty");

    struct Counts {
        std::uint64_t ng = 0, np = 0, ni = 0;
    };
    std::map<int, Counts> counts;
    for (int l : labels) counts[l];

    const std::size_t n = ground.voxel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t g = ground.labels[i];
        const std::int32_t p = pred.labels[i];
        if (g == p) {
            if (g != 0) {
                auto it = counts.find(g);
                if (it != counts.end()) {
                    ++it->second.ng;
                    ++it->second.np;
                    ++it->second.ni;
                }
            }
            continue;
        }
        if (g != 0) {
            auto it = counts.find(g);
            if (it != counts.end()) ++it->second.ng;
        }
        if (p != 0) {
            auto it = counts.find(p);
            if (it != counts.end()) ++it->second.np;
        }
    }

    DiceTable table;
    table.unit = unit;
    for (const auto& [label, c] : counts) {
        DiceEntry e;
        e.n_ground = c.ng;
        e.n_pred = c.np;
        e.n_intersect = c.ni;
        e.both_empty = (c.ng + c.np == 0);
        e.dice = detail::dice_value(c.ng, c.np, c.ni, unit);
        table.per_label[label] = e;
    }
    return table;
}

/// Dice for a single label. Both-empty convention: full score, flagged.
inline DiceEntry dice_entry(const LabelVolume& ground, const LabelVolume& pred, int label_id,
                            DiceUnit unit = DiceUnit::Percent) {
    return dice_table(ground, pred, {label_id}, unit).per_label.at(label_id);
}

inline double dice(const LabelVolume& ground, const LabelVolume& pred, int label_id,
                   DiceUnit unit = DiceUnit::Percent) {
    return dice_entry(ground, pred, label_id, unit).dice;
}

}  // namespace lesionbench
