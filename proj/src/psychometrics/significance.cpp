#include "luxp/error.hpp"
#include "luxp/psychometrics.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>

namespace luxp {

double binomial_two_sided_p(long successes, long trials) {
    if (trials < 0 || successes < 0 || successes > trials) fail_validation("invalid binomial counts");
    if (trials == 0) return 1.0;
    const boost::math::binomial dist(static_cast<double>(trials), 0.5);
    const long tail = std::min(successes, trials - successes);
    return std::min(1.0, 2.0 * boost::math::cdf(dist, static_cast<double>(tail)));
}

std::vector<PairTest> pairwise_tests(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                                     double alpha) {
    const ComparisonMatrix m = build_matrix(records, filter);
    std::vector<PairTest> tests;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            PairTest t;
            t.method_a = m.methods()[i];
            t.method_b = m.methods()[j];
            t.wins_a = m.count(i, j);
            t.wins_b = m.count(j, i);
            t.p_value = binomial_two_sided_p(t.wins_a, t.wins_a + t.wins_b);
            t.significant = t.wins_a + t.wins_b > 0 && t.p_value < alpha;
            tests.push_back(std::move(t));
        }
    return tests;
}

std::set<std::pair<std::string, std::string>> pairwise_significance(const std::vector<ChoiceRecord>& records,
                                                                     const ExperimentFilter& filter, double alpha) {
    std::set<std::pair<std::string, std::string>> flagged;
    for (const auto& t : pairwise_tests(records, filter, alpha))
        if (t.significant) flagged.emplace(t.method_a, t.method_b);
    return flagged;
}

} // namespace luxp
