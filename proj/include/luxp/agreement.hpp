#pragma once

#include "luxp/metric_id.hpp"
#include "luxp/records.hpp"
#include "luxp/score_table.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace luxp {

/// One 2AFC comparison slot: a scene and an unordered method pair, stored
/// with the two ids in ascending order.
struct PairKey {
    Setting setting = Setting::Indoor;
    std::string scene_id;
    std::string first;
    std::string second;

    auto operator<=>(const PairKey&) const = default;
};

PairKey make_pair_key(Setting setting, const std::string& scene, const std::string& a, const std::string& b);
PairKey make_pair_key(const ChoiceRecord& record);

struct PreferenceEntry {
    PairKey key;
    double share_first = 0.5;          // mean over observers of "chose key.first"
    double phi_bar = 0.5;              // majority strength, in [0.5, 1]
    std::optional<std::string> winner; // empty on an exact tie
    std::size_t n_observers = 0;
};

/// Mean preferences of all observers of one experiment, per comparison slot.
class PreferenceTable {
public:
    PreferenceTable() = default;
    explicit PreferenceTable(ExperimentFilter experiment) : experiment_(experiment) {}

    const ExperimentFilter& experiment() const { return experiment_; }
    const std::map<PairKey, PreferenceEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    const PreferenceEntry* find(const PairKey& key) const;

    /// Fraction of observers preferring `a` over `b` in that slot.
    std::optional<double> preference(Setting setting, const std::string& scene, const std::string& a,
                                     const std::string& b) const;

    void insert(PreferenceEntry entry);

private:
    ExperimentFilter experiment_;
    std::map<PairKey, PreferenceEntry> entries_;
};

/// Observers with several records on one slot contribute their mean choice.
PreferenceTable build_preference_table(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter);

struct SubjectAgreement {
    std::string subject_id;
    std::optional<double> omega; // absent when no eligible comparison
    double weighted_hits = 0.0;
    double weight = 0.0;
    std::size_t comparisons = 0;
};

struct AgreementReport {
    ExperimentFilter experiment;
    std::vector<SubjectAgreement> subjects; // sorted by id
    std::optional<double> expected;         // mean omega of the included subjects
    std::set<std::string> excluded;         // subjects left out of this computation

    std::optional<double> omega(const std::string& subject) const;
};

/// Weighted agreement of every subject with the majority:
/// omega = sum(phi_bar * picked_winner) / sum(phi_bar) over the slots the
/// subject answered. Slots whose majority is an exact tie are skipped.
/// Records of `excluded` subjects are ignored.
AgreementReport observer_agreement(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                                   const PreferenceTable& table, const std::set<std::string>& excluded = {});

/// Same formula for metric pseudo-observers (observer_id = metric name).
std::map<std::string, std::optional<double>> metric_agreement(const std::vector<ChoiceRecord>& metric_records,
                                                              const PreferenceTable& table);

/// Union of subjects whose omega falls below 0.5 in any report.
std::set<std::string> exclude_observers(const std::vector<AgreementReport>& reports);

/// Builds one table per experiment key in the log (settings kept apart) and
/// returns every observer whose omega is below 0.5 in at least one of them.
std::set<std::string> observers_below_chance(const std::vector<ChoiceRecord>& records);

std::vector<ChoiceRecord> remove_observers(const std::vector<ChoiceRecord>& records,
                                           const std::set<std::string>& observers);

/// A comparison to be answered by a pseudo-observer.
struct TrialPair {
    ExperimentKey experiment;
    std::string scene_id;
    std::string method_a;
    std::string method_b;
};

/// Distinct (experiment, scene, unordered pair) slots of the matching records.
std::vector<TrialPair> trial_pairs(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter);

/// Lets a metric choose in every pair: the better-oriented value wins and
/// exactly equal values produce a Choice::Tie record.
std::vector<ChoiceRecord> metric_as_observer(const std::vector<MetricVector>& vectors, MetricId metric,
                                             const std::vector<TrialPair>& pairs);

} // namespace luxp
