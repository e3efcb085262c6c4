#include "luxp/error.hpp"
#include "luxp/psychometrics.hpp"

#include <algorithm>
#include <numeric>

namespace luxp {

ComparisonMatrix::ComparisonMatrix(std::vector<std::string> methods)
    : methods_(std::move(methods)), counts_(methods_.size() * methods_.size(), 0) {
    std::vector<std::string> sorted = methods_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        fail_validation("comparison matrix has duplicate method ids");
}

void ComparisonMatrix::add(std::size_t winner, std::size_t loser, long n) {
    if (winner == loser) fail_validation("a method cannot be preferred over itself");
    if (n < 0) fail_validation("comparison counts are non-negative");
    counts_[winner * size() + loser] += n;
}

std::optional<std::size_t> ComparisonMatrix::index_of(const std::string& method) const {
    auto it = std::find(methods_.begin(), methods_.end(), method);
    if (it == methods_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - methods_.begin());
}

long ComparisonMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), 0L); }

ComparisonMatrix ComparisonMatrix::transposed() const {
    ComparisonMatrix t(methods_);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < size(); ++j) t.counts_[j * size() + i] = counts_[i * size() + j];
    return t;
}

ComparisonMatrix build_matrix(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                              const std::optional<std::string>& scene) {
    std::set<std::string> methods;
    for (const auto& r : records) {
        if (!filter.matches(r.experiment) || (scene && r.scene_id != *scene)) continue;
        methods.insert(r.method_a);
        methods.insert(r.method_b);
    }
    if (methods.empty())
        fail_validation("no choice records for " + to_string(filter) + (scene ? " scene " + *scene : std::string()));
    return build_matrix(records, filter, scene, std::vector<std::string>(methods.begin(), methods.end()));
}

ComparisonMatrix build_matrix(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                              const std::optional<std::string>& scene, const std::vector<std::string>& methods) {
    ComparisonMatrix m(methods);
    std::size_t selected = 0;
    for (const auto& r : records) {
        if (!filter.matches(r.experiment) || (scene && r.scene_id != *scene)) continue;
        ++selected;
        auto a = m.index_of(r.method_a);
        auto b = m.index_of(r.method_b);
        if (!a || !b) fail_validation("record names a method outside the comparison set");
        if (r.chosen == Choice::A) m.add(*a, *b);
        else if (r.chosen == Choice::B) m.add(*b, *a);
    }
    if (selected == 0)
        fail_validation("no choice records for " + to_string(filter) + (scene ? " scene " + *scene : std::string()));
    return m;
}

} // namespace luxp
