#include "luxp/agreement.hpp"
#include "luxp/error.hpp"

#include <cmath>

namespace luxp {

PairKey make_pair_key(Setting setting, const std::string& scene, const std::string& a, const std::string& b) {
    return a < b ? PairKey{setting, scene, a, b} : PairKey{setting, scene, b, a};
}

PairKey make_pair_key(const ChoiceRecord& r) {
    return make_pair_key(r.experiment.setting, r.scene_id, r.method_a, r.method_b);
}

const PreferenceEntry* PreferenceTable::find(const PairKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> PreferenceTable::preference(Setting setting, const std::string& scene, const std::string& a,
                                                  const std::string& b) const {
    const PreferenceEntry* e = find(make_pair_key(setting, scene, a, b));
    if (!e) return std::nullopt;
    return a == e->key.first ? e->share_first : 1.0 - e->share_first;
}

void PreferenceTable::insert(PreferenceEntry entry) {
    auto key = entry.key;
    entries_.insert_or_assign(std::move(key), std::move(entry));
}

PreferenceTable build_preference_table(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter) {
    // per slot, per observer: (sum of shares for key.first, record count)
    std::map<PairKey, std::map<std::string, std::pair<double, int>>> votes;
    for (const auto& r : records) {
        if (!filter.matches(r.experiment)) continue;
        const PairKey key = make_pair_key(r);
        const double share_first = r.method_a == key.first ? r.share_a() : 1.0 - r.share_a();
        auto& v = votes[key][r.observer_id];
        v.first += share_first;
        v.second += 1;
    }
    if (votes.empty()) fail_validation("no choice records for " + to_string(filter));

    PreferenceTable table(filter);
    for (const auto& [key, by_observer] : votes) {
        double sum = 0.0;
        for (const auto& [observer, v] : by_observer) sum += v.first / v.second;
        PreferenceEntry e;
        e.key = key;
        e.n_observers = by_observer.size();
        e.share_first = sum / static_cast<double>(e.n_observers);
        e.phi_bar = std::max(e.share_first, 1.0 - e.share_first);
        if (std::abs(e.share_first - 0.5) > 1e-12) e.winner = e.share_first > 0.5 ? key.first : key.second;
        table.insert(std::move(e));
    }
    return table;
}

} // namespace luxp
