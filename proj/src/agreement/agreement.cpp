#include "luxp/agreement.hpp"
#include "luxp/error.hpp"

namespace luxp {

std::optional<double> AgreementReport::omega(const std::string& subject) const {
    for (const auto& s : subjects)
        if (s.subject_id == subject) return s.omega;
    return std::nullopt;
}

AgreementReport observer_agreement(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                                   const PreferenceTable& table, const std::set<std::string>& excluded) {
    // subject -> slot -> (sum of shares for key.first, record count)
    std::map<std::string, std::map<PairKey, std::pair<double, int>>> answers;
    for (const auto& r : records) {
        if (!filter.matches(r.experiment) || excluded.count(r.observer_id)) continue;
        const PairKey key = make_pair_key(r);
        auto& a = answers[r.observer_id][key];
        a.first += r.method_a == key.first ? r.share_a() : 1.0 - r.share_a();
        a.second += 1;
    }

    AgreementReport report;
    report.experiment = filter;
    report.excluded = excluded;
    double omega_sum = 0.0;
    std::size_t omega_count = 0;
    for (const auto& [subject, slots] : answers) {
        SubjectAgreement s;
        s.subject_id = subject;
        for (const auto& [key, a] : slots) {
            const PreferenceEntry* e = table.find(key);
            if (!e || !e->winner) continue;
            const double chose_first = a.first / a.second;
            const double picked_winner = *e->winner == key.first ? chose_first : 1.0 - chose_first;
            s.weighted_hits += e->phi_bar * picked_winner;
            s.weight += e->phi_bar;
            ++s.comparisons;
        }
        if (s.weight > 0.0) {
            s.omega = s.weighted_hits / s.weight;
            omega_sum += *s.omega;
            ++omega_count;
        }
        report.subjects.push_back(std::move(s));
    }
    if (omega_count > 0) report.expected = omega_sum / static_cast<double>(omega_count);
    return report;
}

std::map<std::string, std::optional<double>> metric_agreement(const std::vector<ChoiceRecord>& metric_records,
                                                              const PreferenceTable& table) {
    const auto report = observer_agreement(metric_records, table.experiment(), table);
    std::map<std::string, std::optional<double>> out;
    for (const auto& s : report.subjects) out[s.subject_id] = s.omega;
    return out;
}

std::set<std::string> exclude_observers(const std::vector<AgreementReport>& reports) {
    std::set<std::string> out;
    for (const auto& report : reports)
        for (const auto& s : report.subjects)
            if (s.omega && *s.omega < 0.5) out.insert(s.subject_id);
    return out;
}

std::vector<ChoiceRecord> remove_observers(const std::vector<ChoiceRecord>& records,
                                           const std::set<std::string>& observers) {
    std::vector<ChoiceRecord> out;
    for (const auto& r : records)
        if (!observers.count(r.observer_id)) out.push_back(r);
    return out;
}

std::set<std::string> observers_below_chance(const std::vector<ChoiceRecord>& records) {
    std::set<ExperimentKey> keys;
    for (const auto& r : records) keys.insert(r.experiment);
    std::vector<AgreementReport> reports;
    for (const auto& key : keys)
        reports.push_back(observer_agreement(records, key, build_preference_table(records, key)));
    return exclude_observers(reports);
}

} // namespace luxp
