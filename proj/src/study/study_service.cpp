#include "luxp/study.hpp"

#include "luxp/rng.hpp"

#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <random>

namespace luxp {

namespace {

using nlohmann::json;

std::string random_token() {
    std::random_device rd;
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 4; ++i) {
        std::uint32_t v = rd();
        for (int k = 0; k < 8; ++k, v >>= 4) out.push_back(hex[v & 0xf]);
    }
    return out;
}

std::uint64_t random_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

Side parse_side(const std::string& s) {
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    throw StudyError(400, "side must be 'left' or 'right'");
}

Choice other(Choice c) { return c == Choice::A ? Choice::B : Choice::A; }

} // namespace

std::vector<Trial> StudyService::make_trial_order(const StudyDefinition& study, std::uint64_t seed) {
    auto methods = study.methods;
    std::sort(methods.begin(), methods.end());
    std::vector<Trial> trials;
    for (const auto& scene : study.scenes)
        for (std::size_t i = 0; i < methods.size(); ++i)
            for (std::size_t j = i + 1; j < methods.size(); ++j) trials.push_back({scene, methods[i], methods[j]});
    Rng rng(seed);
    for (std::size_t i = trials.size(); i > 1; --i) std::swap(trials[i - 1], trials[uniform_index(rng, i)]);
    for (auto& t : trials) t.left = uniform01(rng) < 0.5 ? Choice::A : Choice::B;
    return trials;
}

StudyService::StudyService(std::vector<StudyDefinition> studies, std::filesystem::path log_path,
                           StudyServiceOptions options)
    : studies_(std::move(studies)), log_path_(std::move(log_path)), options_(std::move(options)) {
    if (!options_.make_token) options_.make_token = random_token;
    if (!options_.make_seed) options_.make_seed = random_seed;
    if (!options_.now) options_.now = utc_now;
    for (const auto& s : studies_) s.validate();
    replay();
    log_ = std::fopen(log_path_.c_str(), "ab");
    if (!log_) fail_io("cannot open event log " + log_path_.string());
}

StudyService::~StudyService() {
    if (log_) std::fclose(log_);
}

void StudyService::replay() {
    if (!std::filesystem::exists(log_path_)) return;
    std::ifstream in(log_path_, std::ios::binary);
    if (!in) fail_io("cannot read event log " + log_path_.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    // A crash can leave a partial last line; it was never acknowledged.
    const auto last_newline = content.rfind('\n');
    const std::size_t complete = last_newline == std::string::npos ? 0 : last_newline + 1;
    if (complete != content.size()) {
        content.resize(complete);
        std::filesystem::resize_file(log_path_, complete);
    }

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        const std::size_t end = content.find('\n', start);
        const std::string line = content.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const std::string where = log_path_.string() + ":" + std::to_string(line_no);
        try {
            const json e = json::parse(line);
            const auto kind = e.at("event").get<std::string>();
            if (kind == "session") {
                Session s;
                s.token = e.at("token").get<std::string>();
                s.study_id = e.at("study").get<std::string>();
                s.observer_id = e.at("observer").get<std::string>();
                study(s.study_id);
                for (const auto& t : e.at("trials")) {
                    const auto left = t.at(3).get<std::string>();
                    s.trials.push_back({t.at(0).get<std::string>(), t.at(1).get<std::string>(),
                                        t.at(2).get<std::string>(), left == "A" ? Choice::A : Choice::B});
                }
                if (sessions_.count(s.token)) fail_validation("duplicate session at " + where);
                creation_order_.push_back(s.token);
                sessions_.emplace(s.token, std::move(s));
            } else if (kind == "choice") {
                auto it = sessions_.find(e.at("token").get<std::string>());
                if (it == sessions_.end()) fail_validation("choice for unknown session at " + where);
                Session& s = it->second;
                if (e.at("index").get<std::size_t>() != s.answers.size() || s.answers.size() >= s.trials.size())
                    fail_validation("out-of-order choice at " + where);
                s.answers.push_back({parse_side(e.at("side").get<std::string>()), e.at("elapsed_ms").get<double>(),
                                     e.at("timestamp").get<std::string>()});
            } else {
                fail_validation("unknown event '" + kind + "' at " + where);
            }
        } catch (const json::exception& ex) {
            fail_validation("corrupt event log entry at " + where + ": " + ex.what());
        } catch (const StudyError& ex) {
            fail_validation("invalid event log entry at " + where + ": " + ex.what());
        }
    }
}

void StudyService::append(const std::string& line) {
    const std::string data = line + "\n";
    if (std::fwrite(data.data(), 1, data.size(), log_) != data.size() || std::fflush(log_) != 0 ||
        ::fsync(fileno(log_)) != 0)
        fail_io("failed to write event log " + log_path_.string());
}

const StudyDefinition& StudyService::study(const std::string& id) const {
    for (const auto& s : studies_)
        if (s.id == id) return s;
    throw StudyError(404, "unknown study '" + id + "'");
}

const StudyService::Session& StudyService::session(const std::string& token) const {
    auto it = sessions_.find(token);
    if (it == sessions_.end()) throw StudyError(404, "unknown session");
    return it->second;
}

SessionInfo StudyService::create_session(const std::string& study_id, const std::string& observer_id,
                                         bool screening_passed) {
    const StudyDefinition& def = study(study_id);
    if (observer_id.empty()) throw StudyError(400, "observer_id must not be empty");

    std::lock_guard lock(mutex_);
    Session s;
    do {
        s.token = options_.make_token();
    } while (sessions_.count(s.token));
    s.study_id = study_id;
    s.observer_id = observer_id;
    s.trials = make_trial_order(def, options_.make_seed());

    json trials = json::array();
    for (const auto& t : s.trials)
        trials.push_back({t.scene_id, t.method_a, t.method_b, t.left == Choice::A ? "A" : "B"});
    json e = {{"event", "session"},      {"token", s.token},   {"study", study_id},
              {"observer", observer_id}, {"screening", screening_passed}, {"created", options_.now()},
              {"trials", trials}};
    append(e.dump());

    SessionInfo info{s.token, s.trials.size()};
    creation_order_.push_back(s.token);
    sessions_.emplace(s.token, std::move(s));
    return info;
}

TrialView StudyService::get_trial(const std::string& token, std::size_t index) const {
    std::lock_guard lock(mutex_);
    const Session& s = session(token);
    if (s.answers.size() == s.trials.size()) throw StudyError(409, "session is complete");
    if (index != s.answers.size())
        throw StudyError(409, "trial " + std::to_string(index) + " requested, current trial is " +
                                  std::to_string(s.answers.size()));
    TrialView v;
    v.index = index;
    v.n_trials = s.trials.size();
    v.layout = study(s.study_id).layout();
    const std::string base = "/stimuli/" + token + "/" + std::to_string(index) + "/";
    v.left_url = base + "left";
    v.right_url = base + "right";
    if (v.layout == TaskLayout::TripletWithReference) v.reference_url = base + "reference";
    return v;
}

ChoiceAck StudyService::post_choice(const std::string& token, std::size_t index, Side side, double elapsed_ms) {
    if (!std::isfinite(elapsed_ms) || elapsed_ms < 0.0) throw StudyError(400, "elapsed_ms must be non-negative");
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) throw StudyError(404, "unknown session");
    Session& s = it->second;
    const std::size_t cursor = s.answers.size();

    if (cursor > 0 && index == cursor - 1) {
        if (s.answers.back().side != side) throw StudyError(409, "trial " + std::to_string(index) + " was already answered differently");
        return {cursor, cursor == s.trials.size()};
    }
    if (cursor == s.trials.size()) throw StudyError(409, "session is complete");
    if (index != cursor)
        throw StudyError(409, "choice for trial " + std::to_string(index) + ", current trial is " + std::to_string(cursor));

    Answer a{side, elapsed_ms, options_.now()};
    json e = {{"event", "choice"}, {"token", token},           {"index", index},
              {"side", side_name(side)}, {"elapsed_ms", elapsed_ms}, {"timestamp", a.timestamp}};
    append(e.dump());
    s.answers.push_back(std::move(a));
    return {s.answers.size(), s.answers.size() == s.trials.size()};
}

SessionStatus StudyService::status(const std::string& token) const {
    std::lock_guard lock(mutex_);
    const Session& s = session(token);
    return {s.study_id, s.answers.size(), s.trials.size(), s.answers.size() == s.trials.size()};
}

ChoiceRecord StudyService::to_record(const Session& s, std::size_t index) const {
    const Trial& t = s.trials[index];
    const Answer& a = s.answers[index];
    ChoiceRecord r;
    r.observer_id = s.observer_id;
    r.experiment = study(s.study_id).experiment;
    r.scene_id = t.scene_id;
    r.method_a = t.method_a;
    r.method_b = t.method_b;
    r.presented_left = t.left;
    r.chosen = a.side == Side::Left ? t.left : other(t.left);
    r.timestamp = a.timestamp;
    return r;
}

ExportResult StudyService::export_choices(const std::string& study_id, bool include_incomplete) const {
    study(study_id);
    std::lock_guard lock(mutex_);
    ExportResult out;
    for (const auto& token : creation_order_) {
        const Session& s = sessions_.at(token);
        if (s.study_id != study_id) continue;
        const bool complete = s.answers.size() == s.trials.size();
        if (!complete) ++out.incomplete_sessions;
        if (!complete && !include_incomplete) continue;
        for (std::size_t i = 0; i < s.answers.size(); ++i) out.records.push_back(to_record(s, i));
    }
    return out;
}

std::filesystem::path StudyService::stimulus_file(const std::string& token, std::size_t index,
                                                  const std::string& role) const {
    std::lock_guard lock(mutex_);
    const Session& s = session(token);
    if (index >= s.trials.size()) throw StudyError(404, "no such trial");
    const StudyDefinition& def = study(s.study_id);
    const Trial& t = s.trials[index];
    const std::string& left = t.left == Choice::A ? t.method_a : t.method_b;
    const std::string& right = t.left == Choice::A ? t.method_b : t.method_a;
    if (role == "left") return def.stimulus_path(t.scene_id, left);
    if (role == "right") return def.stimulus_path(t.scene_id, right);
    if (role == "reference" && def.layout() == TaskLayout::TripletWithReference) return def.reference_path(t.scene_id);
    throw StudyError(404, "no such image");
}

} // namespace luxp
