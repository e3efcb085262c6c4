#include "luxp/study.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace luxp {

namespace {

bool safe_id(const std::string& s) {
    if (s.empty() || s == "." || s == "..") return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

void check_ids(const std::vector<std::string>& ids, const std::string& what, const std::string& study) {
    std::set<std::string> seen;
    for (const auto& id : ids) {
        if (!safe_id(id)) fail_validation("study '" + study + "' has an invalid " + what + " id '" + id + "'");
        if (!seen.insert(id).second) fail_validation("study '" + study + "' lists " + what + " '" + id + "' twice");
    }
}

} // namespace

std::string to_string(TaskLayout layout) {
    return layout == TaskLayout::TripletWithReference ? "triplet_with_reference" : "pair_in_context";
}

std::filesystem::path StudyDefinition::stimulus_path(const std::string& scene, const std::string& method) const {
    return stimulus_root / scene / (method + ".png");
}

std::filesystem::path StudyDefinition::reference_path(const std::string& scene) const {
    return reference_root / (scene + ".png");
}

void StudyDefinition::validate() const {
    if (!safe_id(id)) fail_validation("invalid study id '" + id + "'");
    if (methods.size() < 2) fail_validation("study '" + id + "' needs at least two methods");
    if (scenes.empty()) fail_validation("study '" + id + "' has no scenes");
    check_ids(methods, "method", id);
    check_ids(scenes, "scene", id);
    for (const auto& scene : scenes) {
        for (const auto& method : methods) {
            const auto p = stimulus_path(scene, method);
            if (!std::filesystem::is_regular_file(p)) fail_validation("missing stimulus " + p.string());
        }
        if (layout() == TaskLayout::TripletWithReference) {
            const auto p = reference_path(scene);
            if (!std::filesystem::is_regular_file(p)) fail_validation("missing reference " + p.string());
        }
    }
}

std::vector<StudyDefinition> load_study_definitions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buffer.str());
    } catch (const std::exception& e) {
        fail_validation("study file " + path.string() + " is not valid JSON: " + e.what());
    }
    const auto base = path.parent_path();
    std::vector<StudyDefinition> out;
    std::set<std::string> ids;
    try {
        for (const auto& s : j.at("studies")) {
            StudyDefinition d;
            d.id = s.at("id").get<std::string>();
            d.experiment.task = parse_task(std::to_string(s.at("task").get<int>()));
            d.experiment.material = parse_material(s.at("material").get<std::string>());
            d.experiment.setting = parse_setting(s.at("setting").get<std::string>());
            d.scenes = s.at("scenes").get<std::vector<std::string>>();
            d.methods = s.at("methods").get<std::vector<std::string>>();
            d.stimulus_root = base / s.at("stimulus_root").get<std::string>();
            if (s.contains("reference_root")) d.reference_root = base / s.at("reference_root").get<std::string>();
            d.validate();
            if (!ids.insert(d.id).second) fail_validation("duplicate study id '" + d.id + "'");
            out.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        fail_validation("malformed study file " + path.string() + ": " + e.what());
    }
    if (out.empty()) fail_validation("study file " + path.string() + " defines no studies");
    return out;
}

} // namespace luxp
