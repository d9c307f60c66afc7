// lesionbench — volumetric segmentation evaluation toolkit.
//
// Subcommands: phantom, preprocess, components, ensemble, score, raters,
// compare, report. All outputs are machine-readable (JSON / CSV); see the
// README for file schemas.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lesionbench/lesionbench.hpp"

namespace lb = lesionbench;
namespace fs = std::filesystem;

namespace {

int default_jobs() {
    if (const char* env = std::getenv("LESIONBENCH_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct ScoreArgs {
    std::string gt_path, pred_path;
    int label = 1;
    std::vector<int> dice_labels;
    std::string label_map_path;
    lb::DetectionParams params;
    std::string json_out, csv_out;
    double discrepancy_pct = 10.0;
};

int cmd_score(const ScoreArgs& args) {
    lb::LabelMap label_map;
    if (!args.label_map_path.empty()) label_map = lb::load_label_map(args.label_map_path);
    const lb::LabelVolume gt = lb::nifti::read_label_volume(args.gt_path, label_map);
    const lb::LabelVolume pred = lb::nifti::read_label_volume(args.pred_path, label_map);

    lb::CaseReport report = lb::score_case(gt, pred, args.label, args.dice_labels, args.params,
                                           args.discrepancy_pct);
    report.case_id = fs::path(args.gt_path).filename().string();

    const lb::Json j = lb::case_report_to_json(report);
    if (!args.json_out.empty())
        lb::save_json_file(j, args.json_out);
    else
        std::cout << j.dump(2) << "\n";

    const lb::DiceEntry& d = report.dice.per_label.at(report.lesion_label);
    std::string flags;
    if (d.both_empty) flags += "dice_both_empty;";
    if (report.f1_vacuous) flags += "f1_vacuous;";
    std::string csv;
    csv += lb::csv_row({"case_id", "label_id", "dice", "sensitivity", "precision", "f1", "n_gt",
                        "n_pred", "fp_count", "fn_count", "flags"});
    csv += lb::csv_row({report.case_id, std::to_string(report.lesion_label),
                        lb::format_double(d.dice), lb::format_double(report.sensitivity),
                        lb::format_double(report.precision), lb::format_double(report.f1),
                        std::to_string(report.n_gt), std::to_string(report.n_pred),
                        std::to_string(report.fp_lesions.size()),
                        std::to_string(report.fn_lesions.size()), flags});
    if (!args.csv_out.empty()) {
        std::ofstream out(args.csv_out, std::ios::trunc);
        if (!out) throw lb::IoError("cannot open for writing: " + args.csv_out);
        out << csv;
    } else {
        std::cerr << csv;
    }

    // per-label dice rows when a table was requested
    if (!args.dice_labels.empty() && !args.csv_out.empty()) {
        const std::string table_path =
            (fs::path(args.csv_out).parent_path() /
             (fs::path(args.csv_out).stem().string() + "_dice.csv"))
                .string();
        std::ofstream out(table_path, std::ios::trunc);
        out << lb::csv_row({"case_id", "label_id", "label_name", "dice", "n_gt", "n_pred",
                            "n_intersect", "flags"});
        for (const auto& [label, entry] : report.dice.per_label) {
            const auto it = gt.label_map.find(label);
            out << lb::csv_row({report.case_id, std::to_string(label),
                                it != gt.label_map.end() ? it->second : "",
                                lb::format_double(entry.dice), std::to_string(entry.n_ground),
                                std::to_string(entry.n_pred), std::to_string(entry.n_intersect),
                                entry.both_empty ? "both_empty" : ""});
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lesionbench: volumetric segmentation evaluation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lb::kVersion);

    // ---- phantom ----
    std::string phantom_spec_path, phantom_out, phantom_perturb_path;
    auto* phantom = app.add_subcommand("phantom", "generate a synthetic label volume");
    phantom->add_option("spec", phantom_spec_path, "phantom spec JSON")->required();
    phantom->add_option("-o,--output", phantom_out, "output volume (.nii / .nii.gz)")->required();
    phantom->add_option("--perturb", phantom_perturb_path,
                        "perturbation spec JSON; output is the perturbed volume");

    // ---- preprocess ----
    std::vector<std::string> pre_images;
    std::string pre_mask, pre_outdir;
    std::vector<double> pre_spacing{1, 1, 1};
    auto* pre = app.add_subcommand("preprocess", "resample to isovoxels, mask, standardize");
    pre->add_option("images", pre_images, "input image volumes")->required();
    pre->add_option("--mask", pre_mask, "brain mask volume")->required();
    pre->add_option("-o,--output-dir", pre_outdir, "output directory")->required();
    pre->add_option("--target-spacing", pre_spacing, "target spacing in mm")->expected(3);

    // ---- components ----
    std::string comp_vol, comp_out, comp_label_map;
    std::vector<int> comp_labels{1};
    double comp_min_mm3 = 3.0;
    int comp_connectivity = 18;
    auto* comp = app.add_subcommand("components", "extract lesions as connected components");
    comp->add_option("volume", comp_vol, "label volume")->required();
    comp->add_option("--label", comp_labels, "label id(s) forming the lesion class");
    comp->add_option("--min-mm3", comp_min_mm3, "minimum lesion volume in mm^3");
    comp->add_option("--connectivity", comp_connectivity, "6, 18 or 26 (expert)")
        ->check(CLI::IsMember({6, 18, 26}));
    comp->add_option("--label-map", comp_label_map, "label map JSON");
    comp->add_option("-o,--output", comp_out, "output JSON (default: stdout)");

    // ---- ensemble ----
    std::vector<std::string> ens_stacks;
    std::string ens_class_map, ens_out, ens_logits_out;
    std::vector<std::size_t> ens_mirrored;
    bool ens_probs = false;
    auto* ens = app.add_subcommand("ensemble", "average logit stacks and emit argmax labels");
    ens->add_option("stacks", ens_stacks, "logit stacks (multi-channel volumes)")->required();
    ens->add_option("--class-map", ens_class_map, "channel->label JSON")->required();
    ens->add_option("-o,--output", ens_out, "output label volume")->required();
    ens->add_option("--mirrored", ens_mirrored,
                    "zero-based indices of stacks that are sagittally mirrored and must be "
                    "un-flipped before averaging");
    ens->add_option("--logits-out", ens_logits_out, "also write the averaged stack");
    ens->add_flag("--probs", ens_probs, "average softmax probabilities instead of raw logits");

    // ---- score ----
    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Dice + lesion-wise F1 for one volume pair");
    score->add_option("--gt", score_args.gt_path, "ground-truth label volume")->required();
    score->add_option("--pred", score_args.pred_path, "predicted label volume")->required();
    score->add_option("--label", score_args.label, "lesion label id");
    score->add_option("--labels", score_args.dice_labels, "extra labels for the Dice table");
    score->add_option("--label-map", score_args.label_map_path, "label map JSON");
    score->add_option("--alpha", score_args.params.alpha_pct, "minimum overlap %");
    score->add_option("--beta", score_args.params.beta_pct, "maximum outside %");
    score->add_option("--gamma", score_args.params.gamma_pct, "overlap-mass prefix %");
    score->add_option("--min-mm3", score_args.params.min_volume_mm3, "minimum lesion volume");
    score->add_option("--json", score_args.json_out, "JSON output path (default: stdout)");
    score->add_option("--csv", score_args.csv_out, "CSV output path (default: stderr)");
    score->add_option("--discrepancy-pct", score_args.discrepancy_pct,
                      "FP/FN audit overlap threshold %");

    // ---- raters ----
    std::vector<std::string> raters_paths;
    std::string raters_out;
    int raters_label = 1;
    auto* raters = app.add_subcommand("raters", "pairwise Dice matrix across raters");
    raters->add_option("volumes", raters_paths, "rater label volumes")->required();
    raters->add_option("--label", raters_label, "label id");
    raters->add_option("-o,--output", raters_out, "output CSV (default: stdout)");

    // ---- compare ----
    std::string cmp_metric = "dice", cmp_a, cmp_b, cmp_out;
    auto* cmp = app.add_subcommand("compare",
                                   "Wilcoxon signed-rank test between two per-case CSV runs");
    cmp->add_option("--metric", cmp_metric, "metric column name (dice, f1, ...)");
    cmp->add_option("runA", cmp_a, "per-case CSV of method A")->required();
    cmp->add_option("runB", cmp_b, "per-case CSV of method B")->required();
    cmp->add_option("-o,--output", cmp_out, "output JSON (default: stdout)");

    // ---- report ----
    std::string report_manifest, report_outdir;
    int report_jobs = default_jobs();
    auto* report = app.add_subcommand("report", "evaluate a manifest of cases");
    report->add_option("manifest", report_manifest, "run manifest JSON")->required();
    report->add_option("-o,--output-dir", report_outdir, "output directory");
    report->add_option("-j,--jobs", report_jobs, "concurrent cases (env LESIONBENCH_JOBS)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*phantom) {
            const lb::PhantomSpec spec =
                lb::phantom_spec_from_json(lb::load_json_file(phantom_spec_path));
            lb::LabelVolume vol = lb::generate_phantom(spec);
            if (!phantom_perturb_path.empty()) {
                const lb::PerturbSpec pspec =
                    lb::perturb_spec_from_json(lb::load_json_file(phantom_perturb_path));
                vol = lb::perturb(vol, pspec);
            }
            lb::nifti::write_label_volume(vol, phantom_out);
        } else if (*pre) {
            fs::create_directories(pre_outdir);
            const lb::PreprocessOptions opts{
                {pre_spacing[0], pre_spacing[1], pre_spacing[2]}, 0.0};
            for (const std::string& image : pre_images) {
                const std::string out =
                    (fs::path(pre_outdir) / fs::path(image).filename()).string();
                lb::run_preprocess(image, pre_mask, out, opts);
                std::cerr << image << " -> " << out << "\n";
            }
        } else if (*comp) {
            auto [header, samples] = lb::nifti::read_volume(comp_vol);
            print_warnings(header.warnings);
            lb::LabelMap label_map;
            if (!comp_label_map.empty()) label_map = lb::load_label_map(comp_label_map);
            const lb::LabelVolume vol = lb::nifti::to_label_volume(header, samples, label_map);
            const lb::LesionSet set =
                lb::extract_lesions(vol, comp_labels, comp_min_mm3,
                                    static_cast<lb::Connectivity>(comp_connectivity));
            const lb::Json j = lb::lesion_set_to_json(set);
            if (!comp_out.empty())
                lb::save_json_file(j, comp_out);
            else
                std::cout << j.dump(2) << "\n";
        } else if (*ens) {
            const auto class_map =
                lb::class_map_from_json(lb::load_json_file(ens_class_map));
            std::vector<lb::LogitStack> stacks;
            for (std::size_t i = 0; i < ens_stacks.size(); ++i) {
                lb::LogitStack s = lb::nifti::read_scalar_volume(ens_stacks[i]);
                if (std::find(ens_mirrored.begin(), ens_mirrored.end(), i) != ens_mirrored.end())
                    s = lb::flip_sagittal(s);
                stacks.push_back(std::move(s));
            }
            const lb::LogitStack mean = lb::ensemble_logits(
                stacks, ens_probs ? lb::EnsembleMode::SoftmaxProbs : lb::EnsembleMode::RawLogits);
            if (!ens_logits_out.empty()) lb::nifti::write_scalar_volume(mean, ens_logits_out);
            lb::nifti::write_label_volume(lb::argmax_labels(mean, class_map), ens_out);
        } else if (*score) {
            return cmd_score(score_args);
        } else if (*raters) {
            if (raters_paths.size() < 2) throw lb::InvalidArgumentError("need >= 2 rater volumes");
            std::vector<lb::LabelVolume> vols;
            for (const std::string& p : raters_paths)
                vols.push_back(lb::nifti::read_label_volume(p));
            const auto matrix = lb::pairwise_dice_matrix(vols, raters_label);
            std::string csv;
            std::vector<std::string> header{"rater"};
            for (const std::string& p : raters_paths)
                header.push_back(fs::path(p).filename().string());
            csv += lb::csv_row(header);
            for (std::size_t i = 0; i < matrix.size(); ++i) {
                std::vector<std::string> row{fs::path(raters_paths[i]).filename().string()};
                for (double v : matrix[i]) row.push_back(lb::format_double(v));
                csv += lb::csv_row(row);
            }
            if (!raters_out.empty()) {
                std::ofstream out(raters_out, std::ios::trunc);
                out << csv;
            } else {
                std::cout << csv;
            }
        } else if (*cmp) {
            const auto load_metric = [&cmp_metric](const std::string& path) {
                const auto rows = lb::load_csv(path);
                if (rows.empty()) throw lb::IoError("empty CSV: " + path);
                const auto& header = rows.front();
                std::size_t case_col = std::string::npos, metric_col = std::string::npos;
                for (std::size_t i = 0; i < header.size(); ++i) {
                    if (header[i] == "case_id") case_col = i;
                    if (header[i] == cmp_metric) metric_col = i;
                }
                if (case_col == std::string::npos || metric_col == std::string::npos)
                    throw lb::IoError(path + " lacks case_id/" + cmp_metric + " columns");
                std::map<std::string, double> values;
                for (std::size_t r = 1; r < rows.size(); ++r) {
                    if (rows[r].size() <= std::max(case_col, metric_col)) continue;
                    const std::string& v = rows[r][metric_col];
                    if (v.empty() || v == "na") continue;
                    values[rows[r][case_col]] = std::stod(v);
                }
                return values;
            };
            const auto a = load_metric(cmp_a);
            const auto b = load_metric(cmp_b);
            lb::PairedSample sample;
            for (const auto& [case_id, va] : a) {
                const auto it = b.find(case_id);
                if (it == b.end()) continue;
                sample.case_ids.push_back(case_id);
                sample.values_a.push_back(va);
                sample.values_b.push_back(it->second);
            }
            if (sample.values_a.empty())
                throw lb::InvalidArgumentError("no shared case_ids between the two runs");
            const lb::WilcoxonResult res = lb::wilcoxon_signed_rank(sample);
            const lb::Json j = lb::wilcoxon_to_json(res);
            if (!cmp_out.empty())
                lb::save_json_file(j, cmp_out);
            else
                std::cout << j.dump(2) << "\n";
        } else if (*report) {
            const lb::RunManifest manifest = lb::load_manifest(report_manifest);
            std::string outdir = !report_outdir.empty() ? report_outdir : manifest.output_dir;
            if (outdir.empty())
                throw lb::InvalidArgumentError("no output directory (manifest or -o)");
            const lb::EvaluationResult result = lb::run_evaluation(manifest, report_jobs);
            lb::write_evaluation_reports(result, manifest, outdir);

            lb::Json meta;
            meta["tool_version"] = lb::kVersion;
            meta["manifest"] = report_manifest;
            meta["manifest_crc32"] = lb::file_crc32(report_manifest);
            meta["jobs"] = report_jobs;
            meta["n_cases"] = result.cases.size();
            meta["n_failed"] = result.n_failed;
            meta["timestamp_unix"] = static_cast<long long>(std::time(nullptr));
            lb::save_json_file(meta, (fs::path(outdir) / "run_metadata.json").string());

            for (const auto& c : result.cases)
                if (c.failed) std::cerr << "case failed: " << c.case_id << ": " << c.error << "\n";
            if (result.all_failed()) {
                std::cerr << "all cases failed\n";
                return 1;
            }
            return result.n_failed > 0 ? 2 : 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
