#include "luxp/combiner.hpp"

#include "luxp/error.hpp"
#include "luxp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace luxp {

std::string to_string(PairCounting counting) {
    return counting == PairCounting::Unordered ? "unordered" : "paper";
}

PairCounting parse_pair_counting(std::string_view text) {
    if (text == "unordered") return PairCounting::Unordered;
    if (text == "paper") return PairCounting::PaperAccounting;
    fail_validation("unknown pair counting '" + std::string(text) + "' (expected unordered or paper)");
}

std::vector<FeatureRow> build_dataset(const PreferenceTable& table, const std::vector<MetricVector>& vectors,
                                      const ExperimentFilter& experiment, PairCounting counting) {
    const auto index = index_vectors(vectors);
    const auto& metrics = combiner_metrics();

    std::map<Setting, std::set<std::string>> methods;
    for (const auto& [key, entry] : table.entries()) {
        methods[key.setting].insert(key.first);
        methods[key.setting].insert(key.second);
    }

    auto values_of = [&](const std::string& scene, const std::string& method) {
        auto it = index.find({scene, method});
        if (it == index.end()) fail_validation("no metric vector for " + scene + "/" + method);
        std::vector<double> out;
        out.reserve(metrics.size());
        for (MetricId m : metrics) {
            auto v = it->second->get(m);
            if (!v) fail_validation("missing " + std::string(metric_name(m)) + " value for " + scene + "/" + method);
            if (!std::isfinite(*v))
                fail_validation("non-finite " + std::string(metric_name(m)) + " value for " + scene + "/" + method);
            out.push_back(*v);
        }
        return out;
    };

    std::vector<FeatureRow> rows;
    for (const auto& [key, entry] : table.entries()) {
        const ExperimentKey exp{table.experiment().task, table.experiment().material, key.setting};
        if (!experiment.matches(exp)) continue;
        const auto va = values_of(key.scene_id, key.first);
        const auto vb = values_of(key.scene_id, key.second);
        FeatureRow forward{exp, key.scene_id, key.first, key.second, {}, entry.share_first};
        FeatureRow backward{exp, key.scene_id, key.second, key.first, {}, 1.0 - entry.share_first};
        for (std::size_t k = 0; k < metrics.size(); ++k) {
            forward.features.push_back(va[k] - vb[k]);
            backward.features.push_back(vb[k] - va[k]);
        }
        const int copies =
            counting == PairCounting::PaperAccounting && methods[key.setting].size() == 3 ? 2 : 1;
        for (int c = 0; c < copies; ++c) {
            rows.push_back(forward);
            rows.push_back(backward);
        }
    }
    return rows;
}

SceneSplit split_scenes(std::vector<std::string> scene_ids, std::size_t n_train, std::size_t n_val,
                        std::uint64_t seed) {
    std::sort(scene_ids.begin(), scene_ids.end());
    if (std::adjacent_find(scene_ids.begin(), scene_ids.end()) != scene_ids.end())
        fail_validation("duplicate scene ids in split");
    if (scene_ids.size() != n_train + n_val)
        fail_validation("cannot split " + std::to_string(scene_ids.size()) + " scenes into " +
                        std::to_string(n_train) + " training and " + std::to_string(n_val) + " validation scenes");
    Rng rng = make_rng(seed, 0);
    for (std::size_t i = scene_ids.size(); i > 1; --i) std::swap(scene_ids[i - 1], scene_ids[uniform_index(rng, i)]);
    SceneSplit split;
    split.train.insert(scene_ids.begin(), scene_ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.insert(scene_ids.begin() + static_cast<std::ptrdiff_t>(n_train), scene_ids.end());
    return split;
}

RowSplit split_rows(const std::vector<FeatureRow>& rows, std::size_t n_train, std::size_t n_val, std::uint64_t seed) {
    std::map<Setting, std::set<std::string>> scenes;
    for (const auto& r : rows) scenes[r.experiment.setting].insert(r.scene_id);
    RowSplit out;
    std::map<Setting, const SceneSplit*> lookup;
    out.per_setting.reserve(scenes.size());
    for (const auto& [setting, ids] : scenes)
        out.per_setting.push_back(split_scenes({ids.begin(), ids.end()}, n_train, n_val,
                                               derive_seed(seed, static_cast<std::uint64_t>(setting))));
    std::size_t i = 0;
    for (const auto& [setting, ids] : scenes) lookup[setting] = &out.per_setting[i++];
    for (const auto& r : rows) {
        if (lookup[r.experiment.setting]->train.count(r.scene_id)) out.train.push_back(r);
        else out.validation.push_back(r);
    }
    return out;
}

} // namespace luxp
