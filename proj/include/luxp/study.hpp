#pragma once

#include "luxp/error.hpp"
#include "luxp/records.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace luxp {

/// Task 1 shows two renders around the ground-truth render; task 2 shows two
/// composites and no reference.
enum class TaskLayout { TripletWithReference, PairInContext };

std::string to_string(TaskLayout layout);

/// One experiment run as a study. Stimuli live at
/// `<stimulus_root>/<scene>/<method>.png`; task 1 references at
/// `<reference_root>/<scene>.png`.
struct StudyDefinition {
    std::string id;
    ExperimentKey experiment;
    std::vector<std::string> scenes;
    std::vector<std::string> methods;
    std::filesystem::path stimulus_root;
    std::filesystem::path reference_root;

    TaskLayout layout() const {
        return experiment.task == Task::Accuracy ? TaskLayout::TripletWithReference : TaskLayout::PairInContext;
    }
    std::filesystem::path stimulus_path(const std::string& scene, const std::string& method) const;
    std::filesystem::path reference_path(const std::string& scene) const;

    /// Checks ids and that every stimulus file exists.
    void validate() const;
};

/// Reads `{"studies": [...]}`; relative roots resolve against the file's
/// directory.
std::vector<StudyDefinition> load_study_definitions(const std::filesystem::path& path);

/// Service-level failure carrying the HTTP status it maps to.
class StudyError : public ValidationError {
public:
    StudyError(int status, const std::string& message) : ValidationError(message), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

enum class Side { Left, Right };

struct Trial {
    std::string scene_id;
    std::string method_a; // method_a < method_b
    std::string method_b;
    Choice left = Choice::A; // which of the two is shown on the left
};

struct SessionInfo {
    std::string token;
    std::size_t n_trials = 0;
};

/// What the client sees of one trial: opaque image URLs only.
struct TrialView {
    std::size_t index = 0;
    std::size_t n_trials = 0;
    TaskLayout layout = TaskLayout::PairInContext;
    std::string left_url;
    std::string right_url;
    std::optional<std::string> reference_url;
};

struct ChoiceAck {
    std::size_t next = 0;
    bool complete = false;
};

struct SessionStatus {
    std::string study_id;
    std::size_t cursor = 0;
    std::size_t n_trials = 0;
    bool complete = false;
};

struct ExportResult {
    std::vector<ChoiceRecord> records;
    std::size_t incomplete_sessions = 0;
};

struct StudyServiceOptions {
    std::function<std::string()> make_token;     // default: 128 random bits, hex
    std::function<std::uint64_t()> make_seed;    // default: std::random_device
    std::function<std::string()> now;            // default: UTC ISO-8601 of the system clock
};

/// Session bookkeeping over an append-only JSON Lines event log. Every state
/// change is written and synced before the call returns, and the log is
/// replayed on construction.
class StudyService {
public:
    StudyService(std::vector<StudyDefinition> studies, std::filesystem::path log_path,
                 StudyServiceOptions options = {});
    ~StudyService();
    StudyService(const StudyService&) = delete;
    StudyService& operator=(const StudyService&) = delete;

    SessionInfo create_session(const std::string& study_id, const std::string& observer_id,
                               bool screening_passed = false);
    TrialView get_trial(const std::string& token, std::size_t index) const;
    ChoiceAck post_choice(const std::string& token, std::size_t index, Side side, double elapsed_ms);
    SessionStatus status(const std::string& token) const;
    ExportResult export_choices(const std::string& study_id, bool include_incomplete = false) const;

    /// File behind a stimulus URL; role is "left", "right" or "reference".
    std::filesystem::path stimulus_file(const std::string& token, std::size_t index, const std::string& role) const;

    const std::vector<StudyDefinition>& studies() const { return studies_; }

    /// Every (scene, unordered pair) once, shuffled, each with an independent
    /// coin flip for the left position.
    static std::vector<Trial> make_trial_order(const StudyDefinition& study, std::uint64_t seed);

private:
    struct Answer {
        Side side = Side::Left;
        double elapsed_ms = 0.0;
        std::string timestamp;
    };
    struct Session {
        std::string token;
        std::string study_id;
        std::string observer_id;
        std::vector<Trial> trials;
        std::vector<Answer> answers; // size == cursor
    };

    const StudyDefinition& study(const std::string& id) const;
    const Session& session(const std::string& token) const;
    void replay();
    void append(const std::string& line);
    ChoiceRecord to_record(const Session& s, std::size_t index) const;

    std::vector<StudyDefinition> studies_;
    std::filesystem::path log_path_;
    StudyServiceOptions options_;
    mutable std::mutex mutex_;
    std::map<std::string, Session> sessions_;
    std::vector<std::string> creation_order_;
    std::FILE* log_ = nullptr;
};

} // namespace luxp
