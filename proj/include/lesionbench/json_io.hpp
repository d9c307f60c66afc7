#pragma once

// JSON and CSV serialization for every file format the toolkit speaks:
// label maps, phantom/perturb specs, class maps, lesion tables, case
// reports, test results. Keys are emitted in insertion order so identical
// inputs serialize byte-identically.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lesionbench/detection.hpp"
#include "lesionbench/errors.hpp"
#include "lesionbench/phantom.hpp"
#include "lesionbench/report.hpp"
#include "lesionbench/stats.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open JSON file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("failed to parse JSON file " + path + ": " + e.what());
    }
    return j;
}

inline void save_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

// ---- label map: {"<id>": "<name>"} -----------------------------------------

inline LabelMap label_map_from_json(const Json& j) {
    LabelMap map;
    for (const auto& [key, value] : j.items()) {
        int id = 0;
        try {
            id = std::stoi(key);
        } catch (const std::exception&) {
            throw IoError("label map key is not an integer: " + key);
        }
        map[id] = value.get<std::string>();
    }
    return map;
}

inline Json label_map_to_json(const LabelMap& map) {
    Json j = Json::object();
    for (const auto& [id, name] : map) j[std::to_string(id)] = name;
    return j;
}

inline LabelMap load_label_map(const std::string& path) {
    return label_map_from_json(load_json_file(path));
}

// ---- class map: {"<channel>": <label id>} ----------------------------------

inline std::map<int, int> class_map_from_json(const Json& j) {
    std::map<int, int> map;
    for (const auto& [key, value] : j.items()) {
        int channel = 0;
        try {
            channel = std::stoi(key);
        } catch (const std::exception&) {
            throw IoError("class map key is not an integer: " + key);
        }
        map[channel] = value.get<int>();
    }
    return map;
}

// ---- phantom / perturb specs ------------------------------------------------

inline PhantomSpec phantom_spec_from_json(const Json& j) {
    PhantomSpec spec;
    if (j.contains("dims")) spec.dims = j.at("dims").get<std::array<int, 3>>();
    if (j.contains("spacing")) spec.spacing = j.at("spacing").get<std::array<double, 3>>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("label_map")) spec.label_map = label_map_from_json(j.at("label_map"));
    if (j.contains("lesions"))
        for (const Json& e : j.at("lesions")) {
            LesionBlob blob;
            blob.center_vox = e.at("center").get<std::array<double, 3>>();
            blob.radius_mm = e.at("radius_mm").get<double>();
            if (e.contains("label")) blob.label = e.at("label").get<int>();
            spec.lesions.push_back(blob);
        }
    if (j.contains("anatomy"))
        for (const Json& e : j.at("anatomy")) {
            AnatomyRegion region;
            const std::string kind = e.value("kind", "ellipsoid");
            if (kind == "box")
                region.kind = AnatomyRegion::Kind::Box;
            else if (kind == "ellipsoid")
                region.kind = AnatomyRegion::Kind::Ellipsoid;
            else
                throw IoError("anatomy kind must be 'box' or 'ellipsoid', got " + kind);
            region.center_vox = e.at("center").get<std::array<double, 3>>();
            region.half_extent_mm = e.at("half_extent_mm").get<std::array<double, 3>>();
            region.label = e.at("label").get<int>();
            spec.anatomy.push_back(region);
        }
    return spec;
}

inline PerturbSpec perturb_spec_from_json(const Json& j) {
    PerturbSpec spec;
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    spec.dilate_prob = j.value("dilate_prob", 0.0);
    spec.erode_prob = j.value("erode_prob", 0.0);
    spec.drop_prob = j.value("drop_prob", 0.0);
    spec.add_fp = j.value("add_fp", 0);
    spec.jitter_vox = j.value("jitter_vox", 0);
    spec.fp_label = j.value("fp_label", 1);
    spec.fp_radius_mm = j.value("fp_radius_mm", 2.0);
    if (j.contains("labels")) spec.labels = j.at("labels").get<std::vector<int>>();
    spec.validate();
    return spec;
}

// ---- lesion tables ----------------------------------------------------------

inline Json lesion_to_json(const LesionSummary& l) {
    Json j;
    j["id"] = l.id;
    j["voxel_count"] = l.voxel_count;
    j["volume_mm3"] = l.volume_mm3;
    j["bbox"] = Json::array({l.bbox_min, l.bbox_max});
    j["centroid"] = l.centroid;
    return j;
}

inline Json lesion_set_to_json(const LesionSet& set) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["label_ids"] = set.label_ids;
    j["connectivity"] = static_cast<int>(set.connectivity);
    j["min_volume_mm3"] = set.min_volume_mm3;
    j["voxel_volume_mm3"] = set.voxel_volume_mm3;
    j["lesion_count"] = set.lesions.size();
    Json arr = Json::array();
    for (const Lesion& l : set.lesions) arr.push_back(lesion_to_json(summarize_lesion(l)));
    j["lesions"] = std::move(arr);
    return j;
}

// ---- case reports -----------------------------------------------------------

inline Json case_report_to_json(const CaseReport& r) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["case_id"] = r.case_id;
    if (!r.method.empty()) j["method"] = r.method;
    if (r.failed) {
        j["failed"] = true;
        j["error"] = r.error;
        return j;
    }
    j["lesion_label"] = r.lesion_label;
    Json dice = Json::object();
    for (const auto& [label, entry] : r.dice.per_label) {
        Json e;
        e["dice"] = entry.dice;
        e["n_gt"] = entry.n_ground;
        e["n_pred"] = entry.n_pred;
        e["n_intersect"] = entry.n_intersect;
        e["both_empty"] = entry.both_empty;
        dice[std::to_string(label)] = std::move(e);
    }
    j["dice"] = std::move(dice);
    j["sensitivity"] = r.sensitivity;
    j["precision"] = r.precision;
    j["f1"] = r.f1;
    j["f1_vacuous"] = r.f1_vacuous;
    j["n_gt"] = r.n_gt;
    j["n_pred"] = r.n_pred;
    j["fp_count"] = r.fp_lesions.size();
    j["fn_count"] = r.fn_lesions.size();
    Json fp = Json::array(), fn = Json::array();
    for (const auto& l : r.fp_lesions) fp.push_back(lesion_to_json(l));
    for (const auto& l : r.fn_lesions) fn.push_back(lesion_to_json(l));
    j["fp_lesions"] = std::move(fp);
    j["fn_lesions"] = std::move(fn);
    return j;
}

inline Json wilcoxon_to_json(const WilcoxonResult& r) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["w"] = r.w_statistic;
    j["w_plus"] = r.w_plus;
    j["w_minus"] = r.w_minus;
    j["n"] = r.n_effective;
    j["p"] = r.p_two_sided;
    j["method"] = r.method == WilcoxonMethod::Exact ? "exact" : "normal_approx";
    j["degenerate"] = r.degenerate;
    return j;
}

// ---- CSV helpers --------------------------------------------------------------

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += csv_escape(fields[i]);
    }
    row += '\n';
    return row;
}

/// Shortest decimal form that round-trips; integers print without a point.
inline std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    std::string s17 = ss.str();
    for (int prec = 1; prec < 17; ++prec) {
        std::ostringstream t;
        t.precision(prec);
        t << v;
        if (std::stod(t.str()) == v) return t.str();
    }
    return s17;
}

/// Minimal CSV reader for the toolkit's own outputs: handles quoted fields
/// and skips '#' comment lines.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field += c;
            }
        }
        fields.push_back(std::move(field));
        rows.push_back(std::move(fields));
    }
    return rows;
}

inline std::vector<std::vector<std::string>> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    return parse_csv(in);
}

}  // namespace lesionbench
