#include "luxp/agreement.hpp"
#include "luxp/error.hpp"

#include <set>
#include <tuple>

namespace luxp {

std::vector<TrialPair> trial_pairs(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter) {
    std::set<std::tuple<ExperimentKey, std::string, std::string, std::string>> seen;
    std::vector<TrialPair> pairs;
    for (const auto& r : records) {
        if (!filter.matches(r.experiment)) continue;
        const PairKey key = make_pair_key(r);
        if (seen.emplace(r.experiment, key.scene_id, key.first, key.second).second)
            pairs.push_back({r.experiment, key.scene_id, key.first, key.second});
    }
    return pairs;
}

std::vector<ChoiceRecord> metric_as_observer(const std::vector<MetricVector>& vectors, MetricId metric,
                                             const std::vector<TrialPair>& pairs) {
    const auto index = index_vectors(vectors);
    auto lookup = [&](const std::string& scene, const std::string& method) {
        auto it = index.find({scene, method});
        if (it == index.end()) fail_validation("no metric vector for " + scene + "/" + method);
        auto value = it->second->get(metric);
        if (!value)
            fail_validation("missing " + std::string(metric_name(metric)) + " value for " + scene + "/" + method);
        return *value;
    };

    const double sign = orientation_sign(metric);
    std::vector<ChoiceRecord> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        const double a = sign * lookup(p.scene_id, p.method_a);
        const double b = sign * lookup(p.scene_id, p.method_b);
        ChoiceRecord r;
        r.observer_id = std::string(metric_name(metric));
        r.experiment = p.experiment;
        r.scene_id = p.scene_id;
        r.method_a = p.method_a;
        r.method_b = p.method_b;
        r.chosen = a > b ? Choice::A : (b > a ? Choice::B : Choice::Tie);
        r.presented_left = Choice::A;
        r.validate();
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace luxp
