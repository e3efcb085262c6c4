#include "luxp/records.hpp"

#include "luxp/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace luxp {

using nlohmann::json;

std::string to_string(Task task) { return task == Task::Accuracy ? "1" : "2"; }

std::string to_string(Material material) { return material == Material::Diffuse ? "diffuse" : "glossy"; }

std::string to_string(Setting setting) { return setting == Setting::Indoor ? "indoor" : "outdoor"; }

std::string to_string(const ExperimentKey& key) {
    return "task" + to_string(key.task) + "_" + to_string(key.material) + "_" + to_string(key.setting);
}

std::string to_string(const ExperimentFilter& filter) {
    return "task" + to_string(filter.task) + "_" + to_string(filter.material) + "_" +
           (filter.setting ? to_string(*filter.setting) : std::string("both"));
}

Task parse_task(std::string_view text) {
    if (text == "1" || text == "accuracy") return Task::Accuracy;
    if (text == "2" || text == "plausibility") return Task::Plausibility;
    fail_validation("unknown task '" + std::string(text) + "' (expected 1 or 2)");
}

Material parse_material(std::string_view text) {
    if (text == "diffuse") return Material::Diffuse;
    if (text == "glossy") return Material::Glossy;
    fail_validation("unknown material '" + std::string(text) + "' (expected diffuse or glossy)");
}

Setting parse_setting(std::string_view text) {
    if (text == "indoor") return Setting::Indoor;
    if (text == "outdoor") return Setting::Outdoor;
    fail_validation("unknown setting '" + std::string(text) + "' (expected indoor or outdoor)");
}

std::vector<ExperimentKey> all_experiments() {
    std::vector<ExperimentKey> keys;
    for (Task t : {Task::Accuracy, Task::Plausibility})
        for (Material m : {Material::Diffuse, Material::Glossy})
            for (Setting s : {Setting::Indoor, Setting::Outdoor}) keys.push_back({t, m, s});
    return keys;
}

void ChoiceRecord::validate() const {
    if (observer_id.empty()) fail_validation("choice record without observer_id");
    if (scene_id.empty()) fail_validation("choice record without scene_id");
    if (method_a.empty() || method_b.empty()) fail_validation("choice record without method ids");
    if (method_a == method_b)
        fail_validation("choice record compares method '" + method_a + "' with itself");
    if (presented_left == Choice::Tie) fail_validation("presented_left must be A or B");
}

double ChoiceRecord::share_a() const {
    switch (chosen) {
    case Choice::A: return 1.0;
    case Choice::B: return 0.0;
    case Choice::Tie: return 0.5;
    }
    return 0.5;
}

namespace {

std::string choice_name(Choice c) {
    switch (c) {
    case Choice::A: return "A";
    case Choice::B: return "B";
    case Choice::Tie: return "tie";
    }
    return "tie";
}

Choice parse_choice(const std::string& text, bool allow_tie) {
    if (text == "A") return Choice::A;
    if (text == "B") return Choice::B;
    if (allow_tie && text == "tie") return Choice::Tie;
    fail_validation("invalid choice value '" + text + "'");
}

std::string field_string(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) fail_validation(std::string("choice record missing field '") + name + "'");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    fail_validation(std::string("choice record field '") + name + "' has the wrong type");
}

} // namespace

std::string to_jsonl_line(const ChoiceRecord& r) {
    // ordered_json keeps the documented field order stable across runs
    nlohmann::ordered_json j;
    j["observer_id"] = r.observer_id;
    j["task"] = static_cast<int>(r.experiment.task);
    j["material"] = to_string(r.experiment.material);
    j["setting"] = to_string(r.experiment.setting);
    j["scene_id"] = r.scene_id;
    j["method_a"] = r.method_a;
    j["method_b"] = r.method_b;
    j["chosen"] = choice_name(r.chosen);
    j["presented_left"] = choice_name(r.presented_left);
    j["timestamp"] = r.timestamp;
    return j.dump();
}

ChoiceRecord parse_choice_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        fail_validation(std::string("malformed choice record: ") + e.what());
    }
    if (!j.is_object()) fail_validation("choice record is not a JSON object");
    ChoiceRecord r;
    r.observer_id = field_string(j, "observer_id");
    r.experiment.task = parse_task(field_string(j, "task"));
    r.experiment.material = parse_material(field_string(j, "material"));
    r.experiment.setting = parse_setting(field_string(j, "setting"));
    r.scene_id = field_string(j, "scene_id");
    r.method_a = field_string(j, "method_a");
    r.method_b = field_string(j, "method_b");
    r.chosen = parse_choice(field_string(j, "chosen"), true);
    r.presented_left = parse_choice(field_string(j, "presented_left"), false);
    r.timestamp = field_string(j, "timestamp");
    r.validate();
    return r;
}

std::vector<ChoiceRecord> read_choices(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open choice log " + path.string());
    std::vector<ChoiceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            records.push_back(parse_choice_line(line));
        } catch (const ValidationError& e) {
            fail_validation(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (in.bad()) fail_io("error while reading " + path.string());
    return records;
}

void write_choices(const std::filesystem::path& path, const std::vector<ChoiceRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write " + path.string());
    for (const auto& r : records) out << to_jsonl_line(r) << '\n';
    if (!out) fail_io("error while writing " + path.string());
}

std::vector<ChoiceRecord> filter_records(const std::vector<ChoiceRecord>& records,
                                         const ExperimentFilter& filter) {
    std::vector<ChoiceRecord> out;
    for (const auto& r : records)
        if (filter.matches(r.experiment)) out.push_back(r);
    return out;
}

} // namespace luxp
