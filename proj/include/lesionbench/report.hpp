#pragma once

// Per-case scoring reports and cohort aggregation.

#include <map>
#include <string>
#include <vector>

#include "lesionbench/detection.hpp"
#include "lesionbench/lesions.hpp"
#include "lesionbench/overlap.hpp"
#include "lesionbench/stats.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

struct LesionSummary {
    int id = 0;
    std::size_t voxel_count = 0;
    double volume_mm3 = 0;
    std::array<int, 3> bbox_min{0, 0, 0};
    std::array<int, 3> bbox_max{0, 0, 0};
    std::array<double, 3> centroid{0, 0, 0};
};

inline LesionSummary summarize_lesion(const Lesion& lesion) {
    return {lesion.id,       lesion.size(),   lesion.volume_mm3,
            lesion.bbox_min, lesion.bbox_max, lesion.centroid};
}

struct CaseReport {
    std::string case_id;
    std::string method;
    bool failed = false;
    std::string error;

    int lesion_label = 1;
    DiceTable dice;  // per requested label, lesion label always included
    double sensitivity = 0;
    double precision = 0;
    double f1 = 0;
    bool f1_vacuous = false;  // both sides lesion-free; f1 is the convention value
    std::size_t n_gt = 0;
    std::size_t n_pred = 0;
    std::vector<LesionSummary> fp_lesions;
    std::vector<LesionSummary> fn_lesions;
};

/// One case end to end: Dice table, lesion-wise detection rates, FP/FN audit.
inline CaseReport score_case(const LabelVolume& gt, const LabelVolume& pred, int lesion_label,
                             const std::vector<int>& dice_labels = {},
                             const DetectionParams& params = {},
                             double discrepancy_overlap_pct = 10.0) {
    CaseReport report;
    report.lesion_label = lesion_label;

    std::vector<int> labels = dice_labels;
    if (std::find(labels.begin(), labels.end(), lesion_label) == labels.end())
        labels.insert(labels.begin(), lesion_label);
    report.dice = dice_table(gt, pred, labels);

    const LesionF1Report f1r = lesion_f1(gt, pred, lesion_label, params);
    report.sensitivity = f1r.sensitivity;
    report.precision = f1r.precision;
    report.f1 = f1r.f1;
    report.f1_vacuous = f1r.gt_empty && f1r.pred_empty;
    report.n_gt = f1r.gt_empty ? 0 : f1r.outcomes_gt.size();
    report.n_pred = f1r.pred_empty ? 0 : f1r.outcomes_pred.size();

    const auto [fp, fn] =
        discrepancy_report(gt, pred, lesion_label, discrepancy_overlap_pct, params);
    for (const Lesion& l : fp) report.fp_lesions.push_back(summarize_lesion(l));
    for (const Lesion& l : fn) report.fn_lesions.push_back(summarize_lesion(l));
    return report;
}

struct CohortSummary {
    // keyed by metric name: "dice", "sensitivity", "precision", "f1",
    // plus "dice_<label>" for every extra Dice label
    std::map<std::string, SummaryStats> metrics;
    std::size_t n_cases = 0;
    std::size_t n_failed = 0;
};

/// Cohort moments per metric. Vacuous entries (both-empty Dice, both-empty
/// F1) are excluded from the moments and counted in n_excluded; failed
/// cases contribute nothing.
inline CohortSummary aggregate_reports(const std::vector<CaseReport>& reports) {
    if (reports.empty()) throw InvalidArgumentError("aggregate_reports: no reports");
    CohortSummary summary;
    summary.n_cases = reports.size();

    std::map<std::string, std::vector<double>> values;
    std::map<std::string, std::size_t> excluded;
    for (const CaseReport& r : reports) {
        if (r.failed) {
            ++summary.n_failed;
            continue;
        }
        for (const auto& [label, entry] : r.dice.per_label) {
            const std::string key =
                label == r.lesion_label ? "dice" : "dice_" + std::to_string(label);
            if (entry.both_empty)
                ++excluded[key];
            else
                values[key].push_back(entry.dice);
        }
        if (r.f1_vacuous) {
            ++excluded["sensitivity"];
            ++excluded["precision"];
            ++excluded["f1"];
        } else {
            values["sensitivity"].push_back(r.sensitivity);
            values["precision"].push_back(r.precision);
            values["f1"].push_back(r.f1);
        }
    }
    for (auto& [key, vals] : values)
        summary.metrics[key] = summarize(std::move(vals), excluded[key]);
    for (const auto& [key, count] : excluded)
        if (!summary.metrics.count(key)) summary.metrics[key] = summarize({}, count);
    return summary;
}

}  // namespace lesionbench
