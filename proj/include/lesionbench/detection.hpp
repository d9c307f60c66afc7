#pragma once

// Lesion-detection rule and lesion-wise F1. A lesion g of segmentation X is
// detected by segmentation Y when
//   (1) the total overlap of Y's lesions with g reaches alpha% of |g|, and
//   (2) the Y-lesions contributing most to that overlap (the shortest
//       prefix, by descending overlap, summing to gamma% of it) do not lie
//       more than beta% outside g.
// Failing (1) is undersegmentation, failing (2) oversegmentation.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "lesionbench/errors.hpp"
#include "lesionbench/lesions.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

struct DetectionParams {
    double alpha_pct = 10.0;  // minimum overlap, % of the target lesion's volume
    double beta_pct = 70.0;   // maximum fraction of the contributing union outside
    double gamma_pct = 65.0;  // overlap-mass prefix defining the contributors
    double min_volume_mm3 = 3.0;
    Connectivity connectivity = Connectivity::FaceEdge18;

    void validate() const {
        if (!(alpha_pct > 0 && alpha_pct <= 100))
            throw InvalidArgumentError("alpha_pct must be in (0, 100]");
        if (!(beta_pct >= 0 && beta_pct <= 100))
            throw InvalidArgumentError("beta_pct must be in [0, 100]");
        if (!(gamma_pct > 0 && gamma_pct <= 100))
            throw InvalidArgumentError("gamma_pct must be in (0, 100]");
        if (min_volume_mm3 < 0) throw InvalidArgumentError("min_volume_mm3 must be >= 0");
    }
};

enum class FailureMode { None, Undersegmented, Oversegmented };

inline const char* failure_mode_name(FailureMode m) {
    switch (m) {
        case FailureMode::None: return "none";
        case FailureMode::Undersegmented: return "undersegmented";
        case FailureMode::Oversegmented: return "oversegmented";
    }
    return "?";
}

struct DetectionOutcome {
    int lesion_id = 0;  // id of the lesion being tested for detection
    bool detected = false;
    FailureMode failure_mode = FailureMode::None;
    std::vector<int> contributing_ids;  // ids in the other segmentation's LesionSet
    std::uint64_t overlap_voxels = 0;   // total overlap with the other side's lesions
};

struct LesionF1Report {
    double sensitivity = 0;  // detected ground lesions / total ground lesions
    double precision = 0;    // role-reversed detection rate of predicted lesions
    double f1 = 0;
    std::vector<DetectionOutcome> outcomes_gt;
    std::vector<DetectionOutcome> outcomes_pred;
    bool gt_empty = false;
    bool pred_empty = false;
};

namespace detail {

struct OverlapEntry {
    int id;
    std::uint64_t overlap;
    std::uint64_t size;
};

// core of the rule, once overlaps between `target` and the other side's
// lesions are known
inline DetectionOutcome evaluate_detection(const Lesion& target,
                                           std::vector<OverlapEntry> overlaps,
                                           const DetectionParams& params) {
    DetectionOutcome out;
    out.lesion_id = target.id;

    std::uint64_t total_overlap = 0;
    for (const auto& e : overlaps) total_overlap += e.overlap;
    out.overlap_voxels = total_overlap;

    const double target_size = static_cast<double>(target.size());
    if (static_cast<double>(total_overlap) * 100.0 < params.alpha_pct * target_size) {
        out.detected = false;
        out.failure_mode = FailureMode::Undersegmented;
        return out;
    }

    std::sort(overlaps.begin(), overlaps.end(), [](const OverlapEntry& a, const OverlapEntry& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        return a.id < b.id;
    });

    std::uint64_t prefix_overlap = 0;
    std::uint64_t prefix_size = 0;
    const double need = params.gamma_pct * static_cast<double>(total_overlap);
    for (const auto& e : overlaps) {
        if (e.overlap == 0) break;
        prefix_overlap += e.overlap;
        prefix_size += e.size;
        out.contributing_ids.push_back(e.id);
        if (static_cast<double>(prefix_overlap) * 100.0 >= need) break;
    }

    // contributors are pairwise disjoint, so |U| and |U \ target| come from sums
    const std::uint64_t outside = prefix_size - prefix_overlap;
    if (static_cast<double>(outside) * 100.0 > params.beta_pct * static_cast<double>(prefix_size)) {
        out.detected = false;
        out.failure_mode = FailureMode::Oversegmented;
        return out;
    }
    out.detected = true;
    out.failure_mode = FailureMode::None;
    return out;
}

// overlap counts of every `others` lesion against every `targets` lesion,
// via one pass over the rasterized id grids
inline std::vector<std::vector<OverlapEntry>> all_overlaps(const LesionSet& targets,
                                                           const LesionSet& others) {
    std::vector<std::vector<std::uint64_t>> counts(
        targets.size() + 1, std::vector<std::uint64_t>(others.size() + 1, 0));
    const auto other_grid = lesion_id_grid(others);
    const std::size_t nx = static_cast<std::size_t>(targets.source_dims[0]);
    const std::size_t ny = static_cast<std::size_t>(targets.source_dims[1]);
    for (const Lesion& t : targets.lesions)
        for (const auto& v : t.voxels) {
            const std::int32_t oid = other_grid[v[0] + nx * (v[1] + ny * v[2])];
            if (oid != 0) ++counts[static_cast<std::size_t>(t.id)][static_cast<std::size_t>(oid)];
        }

    std::vector<std::vector<OverlapEntry>> result(targets.size());
    for (std::size_t ti = 1; ti <= targets.size(); ++ti)
        for (std::size_t oi = 1; oi <= others.size(); ++oi)
            if (counts[ti][oi] > 0)
                result[ti - 1].push_back({static_cast<int>(oi), counts[ti][oi],
                                          others.lesions[oi - 1].size()});
    return result;
}

inline std::vector<DetectionOutcome> detect_all(const LesionSet& targets, const LesionSet& others,
                                                const DetectionParams& params) {
    const auto overlaps = all_overlaps(targets, others);
    std::vector<DetectionOutcome> outcomes;
    outcomes.reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        outcomes.push_back(evaluate_detection(targets.lesions[i], overlaps[i], params));
    return outcomes;
}

}  // namespace detail

/// Does `predictions` detect `ground` under the alpha/beta/gamma rule?
inline DetectionOutcome detect_one(const Lesion& ground, const LesionSet& predictions,
                                   const DetectionParams& params = {}) {
    params.validate();
    const auto pred_grid = lesion_id_grid(predictions);
    const std::size_t nx = static_cast<std::size_t>(predictions.source_dims[0]);
    const std::size_t ny = static_cast<std::size_t>(predictions.source_dims[1]);

    std::vector<std::uint64_t> counts(predictions.size() + 1, 0);
    for (const auto& v : ground.voxels) {
        const std::int32_t pid = pred_grid[v[0] + nx * (v[1] + ny * v[2])];
        if (pid != 0) ++counts[static_cast<std::size_t>(pid)];
    }
    std::vector<detail::OverlapEntry> overlaps;
    for (std::size_t pid = 1; pid <= predictions.size(); ++pid)
        if (counts[pid] > 0)
            overlaps.push_back({static_cast<int>(pid), counts[pid],
                                predictions.lesions[pid - 1].size()});
    return detail::evaluate_detection(ground, overlaps, params);
}

/// Lesion-wise detection rates on lesion sets the caller already extracted.
inline LesionF1Report lesion_f1(const LesionSet& gt, const LesionSet& pred,
                                const DetectionParams& params = {}) {
    params.validate();
    LesionF1Report report;
    report.gt_empty = gt.empty();
    report.pred_empty = pred.empty();

    if (gt.empty() && pred.empty()) {
        report.sensitivity = report.precision = report.f1 = 1.0;
        return report;
    }

    report.outcomes_gt = detail::detect_all(gt, pred, params);
    report.outcomes_pred = detail::detect_all(pred, gt, params);

    std::size_t detected_gt = 0, detected_pred = 0;
    for (const auto& o : report.outcomes_gt) detected_gt += o.detected;
    for (const auto& o : report.outcomes_pred) detected_pred += o.detected;

    report.sensitivity =
        gt.empty() ? 0.0 : static_cast<double>(detected_gt) / static_cast<double>(gt.size());
    report.precision =
        pred.empty() ? 0.0 : static_cast<double>(detected_pred) / static_cast<double>(pred.size());
    const double s = report.sensitivity, p = report.precision;
    report.f1 = (s + p) > 0 ? 2.0 * s * p / (s + p) : 0.0;
    return report;
}

/// Lesion-wise sensitivity, precision and their harmonic mean for one label.
/// Precision is the same rule with the roles of the two volumes reversed.
/// Empty conventions: both sides lesion-free scores 1.0 throughout; exactly
/// one side empty scores 0.
inline LesionF1Report lesion_f1(const LabelVolume& ground_vol, const LabelVolume& pred_vol,
                                int label_id, const DetectionParams& params = {}) {
    if (ground_vol.dims != pred_vol.dims)
        throw DimsMismatchError("lesion_f1: volume dims differ");
    params.validate();

    const LesionSet gt =
        extract_lesions(ground_vol, label_id, params.min_volume_mm3, params.connectivity);
    const LesionSet pred =
        extract_lesions(pred_vol, label_id, params.min_volume_mm3, params.connectivity);
    return lesion_f1(gt, pred, params);
}

/// The human-review audit lists: predicted lesions overlapping the ground
/// foreground by no more than overlap_pct (false positives), and ground
/// lesions overlapping the predicted foreground by no more than overlap_pct
/// (false negatives). The threshold is strict: "more than" escapes the list.
inline std::pair<std::vector<Lesion>, std::vector<Lesion>> discrepancy_report(
    const LabelVolume& ground_vol, const LabelVolume& pred_vol, int label_id,
    double overlap_pct = 10.0, const DetectionParams& params = {}) {
    if (ground_vol.dims != pred_vol.dims)
        throw DimsMismatchError("discrepancy_report: volume dims differ");

    const LesionSet gt =
        extract_lesions(ground_vol, label_id, params.min_volume_mm3, params.connectivity);
    const LesionSet pred =
        extract_lesions(pred_vol, label_id, params.min_volume_mm3, params.connectivity);

    const auto low_overlap = [&](const LesionSet& candidates, const LabelVolume& other) {
        std::vector<Lesion> flagged;
        for (const Lesion& lesion : candidates.lesions) {
            std::uint64_t overlap = 0;
            for (const auto& v : lesion.voxels)
                if (other.at(v[0], v[1], v[2]) == label_id) ++overlap;
            if (static_cast<double>(overlap) * 100.0 <=
                overlap_pct * static_cast<double>(lesion.size()))
                flagged.push_back(lesion);
        }
        return flagged;
    };

    return {low_overlap(pred, ground_vol), low_overlap(gt, pred_vol)};
}

}  // namespace lesionbench
