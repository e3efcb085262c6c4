#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace luxp {

/// Task 1 asks which render matches a shown reference; task 2 asks which
/// composite looks most realistic without a reference.
enum class Task { Accuracy = 1, Plausibility = 2 };
enum class Material { Diffuse, Glossy };
enum class Setting { Indoor, Outdoor };

struct ExperimentKey {
    Task task = Task::Accuracy;
    Material material = Material::Diffuse;
    Setting setting = Setting::Indoor;

    auto operator<=>(const ExperimentKey&) const = default;
};

/// Selects records of one task/material, optionally pooling both settings.
struct ExperimentFilter {
    Task task = Task::Accuracy;
    Material material = Material::Diffuse;
    std::optional<Setting> setting;

    ExperimentFilter() = default;
    ExperimentFilter(Task t, Material m, std::optional<Setting> s = std::nullopt)
        : task(t), material(m), setting(s) {}
    ExperimentFilter(const ExperimentKey& key) // NOLINT: implicit on purpose
        : task(key.task), material(key.material), setting(key.setting) {}

    bool matches(const ExperimentKey& key) const {
        return key.task == task && key.material == material && (!setting || *setting == key.setting);
    }
    auto operator<=>(const ExperimentFilter&) const = default;
};

std::string to_string(Task task);       // "1" / "2"
std::string to_string(Material material);
std::string to_string(Setting setting);
std::string to_string(const ExperimentKey& key);    // e.g. "task1_diffuse_indoor"
std::string to_string(const ExperimentFilter& filter); // "task1_glossy_both" when pooled

Task parse_task(std::string_view text);
Material parse_material(std::string_view text);
Setting parse_setting(std::string_view text);

/// All eight task x material x setting combinations, in a fixed order.
std::vector<ExperimentKey> all_experiments();

/// `Tie` is only produced by metric pseudo-observers whose two values are
/// exactly equal; human records are always A or B.
enum class Choice { A, B, Tie };

struct ChoiceRecord {
    std::string observer_id;
    ExperimentKey experiment;
    std::string scene_id;
    std::string method_a;
    std::string method_b;
    Choice chosen = Choice::A;
    Choice presented_left = Choice::A;
    std::string timestamp; // ISO-8601

    /// Throws ValidationError when the record breaks its invariants.
    void validate() const;

    /// Fraction of this record's vote that goes to method_a (1, 0 or 0.5).
    double share_a() const;
};

/// One JSON object per line; field names are part of the interchange format.
std::string to_jsonl_line(const ChoiceRecord& record);
ChoiceRecord parse_choice_line(std::string_view line);

std::vector<ChoiceRecord> read_choices(const std::filesystem::path& path);
void write_choices(const std::filesystem::path& path, const std::vector<ChoiceRecord>& records);

std::vector<ChoiceRecord> filter_records(const std::vector<ChoiceRecord>& records,
                                         const ExperimentFilter& filter);

} // namespace luxp
