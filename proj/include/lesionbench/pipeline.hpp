#pragma once

// Manifest-driven batch evaluation and the preprocessing pipeline.
// Cases run concurrently up to a jobs limit; an unreadable case is recorded
// and the run continues. Report files are byte-identical across re-runs;
// timestamps and host details are quarantined to the metadata sidecar.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <zlib.h>

#include "lesionbench/detection.hpp"
#include "lesionbench/errors.hpp"
#include "lesionbench/fusion.hpp"
#include "lesionbench/json_io.hpp"
#include "lesionbench/nifti_io.hpp"
#include "lesionbench/report.hpp"
#include "lesionbench/stats.hpp"
#include "lesionbench/version.hpp"
#include "lesionbench/volume_ops.hpp"

namespace lesionbench {

struct ManifestCase {
    std::string case_id;
    std::string gt_path;
    std::map<std::string, std::string> pred_paths;  // method name -> path
    std::vector<std::string> rater_paths;
    std::string mask_path;                 // optional
    std::vector<std::string> logit_paths;  // optional; ensembled into method "ensemble"
    std::vector<std::size_t> mirrored;     // indices into logit_paths to un-flip
};

struct RunManifest {
    std::vector<ManifestCase> cases;
    DetectionParams params;
    int lesion_label = 1;
    std::vector<int> dice_labels;
    std::string label_map_path;  // optional
    std::string class_map_path;  // required when any case carries logits
    std::string output_dir;
    double discrepancy_overlap_pct = 10.0;

    void validate() const {
        if (cases.empty()) throw InvalidArgumentError("manifest has no cases");
        std::set<std::string> ids;
        for (const ManifestCase& c : cases) {
            if (c.case_id.empty()) throw InvalidArgumentError("manifest case without case_id");
            if (!ids.insert(c.case_id).second)
                throw InvalidArgumentError("duplicate case_id: " + c.case_id);
            if (c.gt_path.empty())
                throw InvalidArgumentError("case " + c.case_id + " has no gt path");
            if (c.pred_paths.empty() && c.logit_paths.empty())
                throw InvalidArgumentError("case " + c.case_id + " has no predictions");
            if (!c.logit_paths.empty() && class_map_path.empty())
                throw InvalidArgumentError("case " + c.case_id +
                                           " carries logits but manifest has no class_map");
        }
        params.validate();
    }
};

inline RunManifest manifest_from_json(const Json& j, const std::string& base_dir = "") {
    namespace fs = std::filesystem;
    const auto resolve = [&base_dir](const std::string& p) {
        if (base_dir.empty() || p.empty() || fs::path(p).is_absolute()) return p;
        return (fs::path(base_dir) / p).string();
    };

    RunManifest m;
    if (j.contains("label")) m.lesion_label = j.at("label").get<int>();
    if (j.contains("dice_labels")) m.dice_labels = j.at("dice_labels").get<std::vector<int>>();
    if (j.contains("label_map")) m.label_map_path = resolve(j.at("label_map").get<std::string>());
    if (j.contains("class_map")) m.class_map_path = resolve(j.at("class_map").get<std::string>());
    if (j.contains("output_dir")) m.output_dir = resolve(j.at("output_dir").get<std::string>());
    if (j.contains("discrepancy_overlap_pct"))
        m.discrepancy_overlap_pct = j.at("discrepancy_overlap_pct").get<double>();
    if (j.contains("params")) {
        const Json& p = j.at("params");
        m.params.alpha_pct = p.value("alpha_pct", m.params.alpha_pct);
        m.params.beta_pct = p.value("beta_pct", m.params.beta_pct);
        m.params.gamma_pct = p.value("gamma_pct", m.params.gamma_pct);
        m.params.min_volume_mm3 = p.value("min_volume_mm3", m.params.min_volume_mm3);
    }
    for (const Json& c : j.at("cases")) {
        ManifestCase mc;
        mc.case_id = c.at("case_id").get<std::string>();
        mc.gt_path = resolve(c.at("gt").get<std::string>());
        if (c.contains("pred")) mc.pred_paths["pred"] = resolve(c.at("pred").get<std::string>());
        if (c.contains("preds"))
            for (const auto& [method, path] : c.at("preds").items())
                mc.pred_paths[method] = resolve(path.get<std::string>());
        if (c.contains("raters"))
            for (const Json& r : c.at("raters")) mc.rater_paths.push_back(resolve(r.get<std::string>()));
        if (c.contains("mask")) mc.mask_path = resolve(c.at("mask").get<std::string>());
        if (c.contains("logits"))
            for (const Json& l : c.at("logits")) mc.logit_paths.push_back(resolve(l.get<std::string>()));
        if (c.contains("mirrored")) mc.mirrored = c.at("mirrored").get<std::vector<std::size_t>>();
        m.cases.push_back(std::move(mc));
    }
    m.validate();
    return m;
}

inline RunManifest load_manifest(const std::string& path) {
    return manifest_from_json(load_json_file(path),
                              std::filesystem::path(path).parent_path().string());
}

struct CaseResult {
    std::string case_id;
    bool failed = false;
    std::string error;
    std::vector<CaseReport> reports;                       // one per method
    std::map<std::string, std::vector<double>> rater_dice;  // method -> dice vs each rater
};

struct EvaluationResult {
    std::vector<CaseResult> cases;
    std::size_t n_failed = 0;
    bool all_failed() const { return n_failed == cases.size(); }
};

namespace detail {

inline CaseResult evaluate_case(const ManifestCase& mc, const RunManifest& manifest,
                                const LabelMap& label_map,
                                const std::map<int, int>& class_map) {
    CaseResult result;
    result.case_id = mc.case_id;
    try {
        const LabelVolume gt = nifti::read_label_volume(mc.gt_path, label_map);

        std::map<std::string, LabelVolume> preds;
        for (const auto& [method, path] : mc.pred_paths)
            preds.emplace(method, nifti::read_label_volume(path, label_map));

        if (!mc.logit_paths.empty()) {
            std::vector<LogitStack> stacks;
            for (std::size_t i = 0; i < mc.logit_paths.size(); ++i) {
                LogitStack s = nifti::read_scalar_volume(mc.logit_paths[i]);
                if (std::find(mc.mirrored.begin(), mc.mirrored.end(), i) != mc.mirrored.end())
                    s = flip_sagittal(s);
                stacks.push_back(std::move(s));
            }
            preds.emplace("ensemble",
                          argmax_labels(ensemble_logits(stacks), class_map, label_map));
        }

        for (const auto& [method, pred] : preds) {
            CaseReport report =
                score_case(gt, pred, manifest.lesion_label, manifest.dice_labels,
                           manifest.params, manifest.discrepancy_overlap_pct);
            report.case_id = mc.case_id;
            report.method = method;
            result.reports.push_back(std::move(report));
        }

        if (!mc.rater_paths.empty()) {
            std::vector<LabelVolume> raters;
            for (const std::string& path : mc.rater_paths)
                raters.push_back(nifti::read_label_volume(path, label_map));
            for (const auto& [method, pred] : preds) {
                std::vector<double>& row = result.rater_dice[method];
                for (const LabelVolume& rater : raters)
                    row.push_back(dice(rater, pred, manifest.lesion_label));
            }
        }
    } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
        result.reports.clear();
    }
    return result;
}

inline std::string metric_or_na(const std::map<std::string, SummaryStats>& metrics,
                                const std::string& key, double SummaryStats::*field) {
    const auto it = metrics.find(key);
    if (it == metrics.end() || it->second.n == 0) return "na";
    return format_double(it->second.*field);
}

}  // namespace detail

/// Scores every (case, method) pair in the manifest. Case order in the
/// result matches the manifest regardless of the jobs count.
inline EvaluationResult run_evaluation(const RunManifest& manifest, int jobs = 1) {
    manifest.validate();
    if (jobs < 1) jobs = 1;

    LabelMap label_map;
    if (!manifest.label_map_path.empty()) label_map = load_label_map(manifest.label_map_path);
    std::map<int, int> class_map;
    if (!manifest.class_map_path.empty())
        class_map = class_map_from_json(load_json_file(manifest.class_map_path));

    EvaluationResult result;
    result.cases.resize(manifest.cases.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.cases.size()) return;
            result.cases[i] =
                detail::evaluate_case(manifest.cases[i], manifest, label_map, class_map);
        }
    };
    if (jobs == 1 || manifest.cases.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_threads = std::min<int>(jobs, static_cast<int>(manifest.cases.size()));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (const CaseResult& c : result.cases) result.n_failed += c.failed;
    return result;
}

/// Writes per-case JSON reports, the cohort CSV (one row per method), the
/// per-case CSV, and — when raters are present — the per-rater Dice CSV.
inline void write_evaluation_reports(const EvaluationResult& result, const RunManifest& manifest,
                                     const std::string& output_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(output_dir) / "cases");

    std::map<std::string, std::vector<CaseReport>> by_method;
    for (const CaseResult& c : result.cases) {
        Json j;
        j["schema_version"] = kSchemaVersion;
        j["case_id"] = c.case_id;
        if (c.failed) {
            j["failed"] = true;
            j["error"] = c.error;
        } else {
            Json methods = Json::object();
            for (const CaseReport& r : c.reports) {
                methods[r.method] = case_report_to_json(r);
                by_method[r.method].push_back(r);
            }
            j["methods"] = std::move(methods);
        }
        save_json_file(j, (fs::path(output_dir) / "cases" / (c.case_id + ".json")).string());
    }

    // per-case rows
    {
        std::ofstream out(fs::path(output_dir) / "percase.csv", std::ios::trunc);
        out << "# schema: lesionbench-percase-v" << kSchemaVersion << "\n";
        out << csv_row({"case_id", "method", "label_id", "dice", "sensitivity", "precision", "f1",
                        "n_gt", "n_pred", "fp_count", "fn_count", "flags"});
        for (const CaseResult& c : result.cases) {
            if (c.failed) {
                out << csv_row({c.case_id, "", "", "", "", "", "", "", "", "", "",
                                "failed:" + c.error});
                continue;
            }
            for (const CaseReport& r : c.reports) {
                const DiceEntry& d = r.dice.per_label.at(r.lesion_label);
                std::string flags;
                if (d.both_empty) flags += "dice_both_empty;";
                if (r.f1_vacuous) flags += "f1_vacuous;";
                out << csv_row({c.case_id, r.method, std::to_string(r.lesion_label),
                                format_double(d.dice), format_double(r.sensitivity),
                                format_double(r.precision), format_double(r.f1),
                                std::to_string(r.n_gt), std::to_string(r.n_pred),
                                std::to_string(r.fp_lesions.size()),
                                std::to_string(r.fn_lesions.size()), flags});
            }
        }
    }

    // cohort summary, one row per method
    {
        std::ofstream out(fs::path(output_dir) / "cohort.csv", std::ios::trunc);
        out << "# schema: lesionbench-cohort-v" << kSchemaVersion << "\n";
        out << csv_row({"method", "n_cases", "mean_dice", "median_dice", "std_dice", "mean_f1",
                        "median_f1", "std_f1", "mean_sensitivity", "mean_precision"});
        for (const auto& [method, reports] : by_method) {
            const CohortSummary s = aggregate_reports(reports);
            out << csv_row({method, std::to_string(reports.size()),
                            detail::metric_or_na(s.metrics, "dice", &SummaryStats::mean),
                            detail::metric_or_na(s.metrics, "dice", &SummaryStats::median),
                            detail::metric_or_na(s.metrics, "dice", &SummaryStats::stddev),
                            detail::metric_or_na(s.metrics, "f1", &SummaryStats::mean),
                            detail::metric_or_na(s.metrics, "f1", &SummaryStats::median),
                            detail::metric_or_na(s.metrics, "f1", &SummaryStats::stddev),
                            detail::metric_or_na(s.metrics, "sensitivity", &SummaryStats::mean),
                            detail::metric_or_na(s.metrics, "precision", &SummaryStats::mean)});
        }
    }

    // per-rater mean Dice per method (only when raters were supplied)
    std::map<std::string, std::vector<std::vector<double>>> rater_rows;
    for (const CaseResult& c : result.cases)
        for (const auto& [method, row] : c.rater_dice) rater_rows[method].push_back(row);
    if (!rater_rows.empty()) {
        std::size_t n_raters = 0;
        for (const auto& [method, rows] : rater_rows)
            for (const auto& row : rows) n_raters = std::max(n_raters, row.size());

        std::ofstream out(fs::path(output_dir) / "raters.csv", std::ios::trunc);
        out << "# schema: lesionbench-raters-v" << kSchemaVersion << "\n";
        std::vector<std::string> header{"rater"};
        for (const auto& [method, rows] : rater_rows) header.push_back(method);
        out << csv_row(header);
        for (std::size_t rater = 0; rater < n_raters; ++rater) {
            std::vector<std::string> row{"R" + std::to_string(rater + 1)};
            for (const auto& [method, rows] : rater_rows) {
                double sum = 0;
                std::size_t n = 0;
                for (const auto& r : rows)
                    if (rater < r.size()) {
                        sum += r[rater];
                        ++n;
                    }
                row.push_back(n ? format_double(sum / static_cast<double>(n)) : "na");
            }
            out << csv_row(row);
        }
    }

    if (result.n_failed > 0) {
        std::ofstream out(fs::path(output_dir) / "errors.log", std::ios::trunc);
        for (const CaseResult& c : result.cases)
            if (c.failed) out << c.case_id << ": " << c.error << "\n";
    }
}

// ---- preprocessing ----------------------------------------------------------

struct PreprocessOptions {
    std::array<double, 3> target_spacing{1, 1, 1};
    double mask_fill = 0.0;
};

inline std::uint32_t file_crc32(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for checksum: " + path);
    std::uint32_t crc = static_cast<std::uint32_t>(crc32(0L, Z_NULL, 0));
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        crc = static_cast<std::uint32_t>(
            crc32(crc, reinterpret_cast<const Bytef*>(buf), static_cast<uInt>(in.gcount())));
    return crc;
}

/// resample -> mask -> standardize, plus a provenance sidecar holding the
/// parameters, toolkit version, and input checksums. Returns the sidecar.
inline Json run_preprocess(const std::string& image_path, const std::string& mask_path,
                           const std::string& out_path, const PreprocessOptions& opts = {}) {
    const ScalarVolume image = nifti::read_scalar_volume(image_path);
    const BrainMask mask = nifti::read_brain_mask(mask_path);
    if (image.dims != mask.dims)
        throw DimsMismatchError("preprocess: image and mask dims differ");

    const ScalarVolume resampled = resample_to_isovoxel(image, opts.target_spacing);
    const BrainMask mask_resampled = resample_to_isovoxel(mask, opts.target_spacing);
    const ScalarVolume masked = apply_mask(resampled, mask_resampled, opts.mask_fill);
    const ScalarVolume standardized = standardize_intensities(masked, mask_resampled);
    nifti::write_scalar_volume(standardized, out_path);

    Json sidecar;
    sidecar["schema_version"] = kSchemaVersion;
    sidecar["tool_version"] = kVersion;
    sidecar["image"] = image_path;
    sidecar["mask"] = mask_path;
    sidecar["image_crc32"] = file_crc32(image_path);
    sidecar["mask_crc32"] = file_crc32(mask_path);
    sidecar["target_spacing"] = opts.target_spacing;
    sidecar["mask_fill"] = opts.mask_fill;
    sidecar["steps"] = Json::array({"resample_to_isovoxel", "apply_mask", "standardize_intensities"});
    save_json_file(sidecar, out_path + ".provenance.json");
    return sidecar;
}

}  // namespace lesionbench
