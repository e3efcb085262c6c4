#include "luxp/agreement.hpp"
#include "luxp/error.hpp"
#include "luxp/simulator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace luxp;

namespace {

const ExperimentKey key_t1{Task::Accuracy, Material::Glossy, Setting::Outdoor};

ChoiceRecord vote(const std::string& observer, const std::string& scene, const std::string& a, const std::string& b,
                  Choice chosen, ExperimentKey exp = key_t1) {
    return {observer, exp, scene, a, b, chosen, Choice::B, "2024-01-01T00:00:00Z"};
}

// Eq. 2 evaluated directly: majority per slot from raw votes, then a
// weighted hit rate for one subject.
double omega_oracle(const std::vector<ChoiceRecord>& panel, const std::vector<ChoiceRecord>& subject) {
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, double>> votes; // (a-votes, total)
    auto slot = [](const ChoiceRecord& r) {
        return std::make_tuple(r.scene_id, std::min(r.method_a, r.method_b), std::max(r.method_a, r.method_b));
    };
    auto chose_low = [](const ChoiceRecord& r) {
        const std::string winner = r.chosen == Choice::A ? r.method_a : r.method_b;
        return winner == std::min(r.method_a, r.method_b) ? 1.0 : 0.0;
    };
    for (const auto& r : panel) {
        auto& v = votes[slot(r)];
        v.first += chose_low(r);
        v.second += 1;
    }
    double num = 0, den = 0;
    for (const auto& r : subject) {
        const auto& v = votes.at(slot(r));
        const double share = v.first / v.second;
        if (share == 0.5) continue;
        const double weight = std::max(share, 1 - share);
        const double agreed = (share > 0.5) == (chose_low(r) == 1.0) ? 1.0 : 0.0;
        num += weight * agreed;
        den += weight;
    }
    return num / den;
}

std::vector<ChoiceRecord> panel_records(std::size_t observers, std::size_t scenes, std::uint64_t seed,
                                        double spread = 0.2) {
    SyntheticObserverSpec spec{{{"a", 0.0}, {"b", spread}, {"c", 2 * spread}, {"d", 3 * spread}, {"e", 4 * spread}}};
    spec.seed = seed;
    std::vector<std::string> scene_list;
    for (std::size_t s = 0; s < scenes; ++s) scene_list.push_back("out" + std::to_string(s));
    return simulate_choices(spec, observer_ids(observers), scene_list, all_pairs({"a", "b", "c", "d", "e"}), key_t1);
}

} // namespace

TEST_CASE("preference table") {
    const std::vector<ChoiceRecord> records{
        vote("o1", "s", "x", "y", Choice::A), vote("o2", "s", "y", "x", Choice::B), vote("o3", "s", "x", "y", Choice::B),
        vote("o1", "t", "x", "y", Choice::A), vote("o2", "t", "x", "y", Choice::B)};
    const PreferenceTable table = build_preference_table(records, key_t1);
    CHECK(table.size() == 2);
    const PreferenceEntry* e = table.find(make_pair_key(Setting::Outdoor, "s", "y", "x"));
    REQUIRE(e != nullptr);
    CHECK(e->phi_bar == doctest::Approx(2.0 / 3.0));
    CHECK(e->winner == std::optional<std::string>("x"));
    CHECK(e->n_observers == 3);
    CHECK(*table.preference(Setting::Outdoor, "s", "y", "x") == doctest::Approx(1.0 / 3.0));
    const PreferenceEntry* tie = table.find(make_pair_key(Setting::Outdoor, "t", "x", "y"));
    CHECK(tie->phi_bar == 0.5);
    CHECK_FALSE(tie->winner.has_value());

    // an observer answering twice counts once, with the mean of their answers
    auto repeated = records;
    repeated.push_back(vote("o3", "s", "x", "y", Choice::A));
    const PreferenceEntry* r = build_preference_table(repeated, key_t1).find(make_pair_key(Setting::Outdoor, "s", "x", "y"));
    CHECK(r->n_observers == 3);
    CHECK(r->share_first == doctest::Approx((1 + 1 + 0.5) / 3.0));

    const auto panel = panel_records(4, 7, 1);
    CHECK(build_preference_table(panel, key_t1).size() == 7 * 10);
    CHECK_THROWS_AS(build_preference_table(records, ExperimentFilter(Task::Plausibility, Material::Glossy)),
                    ValidationError);
}

TEST_CASE("worked agreement example") {
    // pair 1 votes (A, A, B), pair 2 votes (A, B, B)
    const std::vector<ChoiceRecord> records{
        vote("o1", "s", "a", "b", Choice::A), vote("o2", "s", "a", "b", Choice::A), vote("o3", "s", "a", "b", Choice::B),
        vote("o1", "s", "a", "c", Choice::A), vote("o2", "s", "a", "c", Choice::B), vote("o3", "s", "a", "c", Choice::B)};
    const PreferenceTable table = build_preference_table(records, key_t1);
    const AgreementReport report = observer_agreement(records, key_t1, table);
    CHECK(*report.omega("o1") == doctest::Approx(0.5));
    CHECK(*report.omega("o2") == doctest::Approx(1.0));
    CHECK(*report.omega("o3") == doctest::Approx(0.5));
    CHECK(*report.expected == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(report.omega("nobody").has_value());
}

TEST_CASE("agreement matches the direct formula and ignores record order") {
    auto panel = panel_records(7, 12, 3);
    const PreferenceTable table = build_preference_table(panel, key_t1);
    const AgreementReport report = observer_agreement(panel, key_t1, table);
    for (const auto& s : report.subjects) {
        std::vector<ChoiceRecord> own;
        std::copy_if(panel.begin(), panel.end(), std::back_inserter(own),
                     [&](const ChoiceRecord& r) { return r.observer_id == s.subject_id; });
        CHECK(*s.omega == doctest::Approx(omega_oracle(panel, own)).epsilon(1e-12));
        CHECK(*s.omega >= 0.0);
        CHECK(*s.omega <= 1.0);
    }

    Rng rng = make_rng(4, 0);
    for (std::size_t i = panel.size(); i > 1; --i) std::swap(panel[i - 1], panel[uniform_index(rng, i)]);
    const AgreementReport shuffled = observer_agreement(panel, key_t1, build_preference_table(panel, key_t1));
    for (const auto& s : report.subjects) CHECK(*shuffled.omega(s.subject_id) == *s.omega);
}

TEST_CASE("agreement baselines") {
    const auto panel = panel_records(9, 1000, 5); // 10,000 comparison slots, odd panel so no ties
    const PreferenceTable table = build_preference_table(panel, key_t1);
    REQUIRE(table.size() == 10000);

    std::vector<ChoiceRecord> majority, random;
    Rng rng = make_rng(6, 0);
    for (const auto& [key, entry] : table.entries()) {
        REQUIRE(entry.winner.has_value());
        const std::string loser = *entry.winner == key.first ? key.second : key.first;
        majority.push_back(vote("oracle", key.scene_id, loser, *entry.winner, Choice::B));
        random.push_back(vote("coin", key.scene_id, key.first, key.second, uniform01(rng) < 0.5 ? Choice::A : Choice::B));
    }
    CHECK(*observer_agreement(majority, key_t1, table).omega("oracle") == 1.0);
    const double coin = *observer_agreement(random, key_t1, table).omega("coin");
    CHECK(coin >= 0.48);
    CHECK(coin <= 0.52);

    std::vector<ChoiceRecord> contrarian = majority;
    for (auto& r : contrarian) r.chosen = Choice::A;
    CHECK(*observer_agreement(contrarian, key_t1, table).omega("oracle") == 0.0);
}

TEST_CASE("ties are skipped and stronger majorities weigh more") {
    std::vector<ChoiceRecord> records{vote("o1", "s", "a", "b", Choice::A), vote("o2", "s", "a", "b", Choice::B)};
    const AgreementReport only_ties = observer_agreement(records, key_t1, build_preference_table(records, key_t1));
    CHECK_FALSE(only_ties.omega("o1").has_value());
    CHECK_FALSE(only_ties.expected.has_value());

    // slot p has a 9/10 majority for a, slot q a 6/10 majority for c
    std::vector<ChoiceRecord> panel;
    for (int i = 0; i < 10; ++i) {
        const std::string o = "p" + std::to_string(i);
        panel.push_back(vote(o, "s", "a", "b", i < 9 ? Choice::A : Choice::B));
        panel.push_back(vote(o, "s", "c", "d", i < 6 ? Choice::A : Choice::B));
    }
    const PreferenceTable table = build_preference_table(panel, key_t1);
    const std::vector<ChoiceRecord> flip_strong{vote("x", "s", "a", "b", Choice::B), vote("x", "s", "c", "d", Choice::A)};
    const std::vector<ChoiceRecord> flip_weak{vote("x", "s", "a", "b", Choice::A), vote("x", "s", "c", "d", Choice::B)};
    const double strong = *observer_agreement(flip_strong, key_t1, table).omega("x");
    const double weak = *observer_agreement(flip_weak, key_t1, table).omega("x");
    CHECK(strong == doctest::Approx(0.6 / 1.5));
    CHECK(weak == doctest::Approx(0.9 / 1.5));
    CHECK(strong < weak);
}

TEST_CASE("observer exclusion and recomputation") {
    auto panel = panel_records(4, 6, 9, 1.0);
    // a fifth observer always picks the method with the lower latent score
    const auto base = panel;
    for (const auto& r : base)
        if (r.observer_id == "obs00") {
            ChoiceRecord c = r;
            c.observer_id = "contrarian";
            c.chosen = c.method_a < c.method_b ? Choice::A : Choice::B;
            panel.push_back(c);
        }
    const PreferenceTable table = build_preference_table(panel, key_t1);
    const AgreementReport before = observer_agreement(panel, key_t1, table);
    REQUIRE(before.omega("contrarian").has_value());
    REQUIRE(*before.omega("contrarian") < 0.5);

    const auto excluded = exclude_observers({before});
    CHECK(excluded == std::set<std::string>{"contrarian"});
    const auto kept = remove_observers(panel, excluded);
    CHECK(kept.size() == panel.size() - 60);
    const AgreementReport after = observer_agreement(kept, key_t1, build_preference_table(kept, key_t1));
    CHECK(after.subjects.size() == 4);
    for (const auto& s : after.subjects) {
        std::vector<ChoiceRecord> own;
        std::copy_if(kept.begin(), kept.end(), std::back_inserter(own),
                     [&](const ChoiceRecord& r) { return r.observer_id == s.subject_id; });
        CHECK(*s.omega == doctest::Approx(omega_oracle(kept, own)).epsilon(1e-12));
    }

    // one report below 0.5 is enough; exactly 0.5 is kept
    AgreementReport low, edge;
    low.subjects.push_back({"o", 0.49, 0, 0, 1});
    edge.subjects.push_back({"o", 0.9, 0, 0, 1});
    edge.subjects.push_back({"p", 0.5, 0, 0, 1});
    CHECK(exclude_observers({edge, low}) == std::set<std::string>{"o"});
    CHECK(exclude_observers({edge}).empty());

    // the excluded argument drops the observer's records from the report
    const AgreementReport skipping = observer_agreement(panel, key_t1, table, excluded);
    CHECK_FALSE(skipping.omega("contrarian").has_value());
    CHECK(skipping.excluded == excluded);
}

TEST_CASE("metrics as pseudo-observers") {
    const std::vector<TrialPair> pairs{{key_t1, "s", "a", "b"}, {key_t1, "s", "b", "c"}, {key_t1, "s", "a", "c"}};
    std::vector<MetricVector> vectors{{"s", "a", {{MetricId::Rmse, 0.1}, {MetricId::Psnr, 30.0}}},
                                      {"s", "b", {{MetricId::Rmse, 0.2}, {MetricId::Psnr, 28.0}}},
                                      {"s", "c", {{MetricId::Rmse, 0.2}, {MetricId::Psnr, 35.0}}}};
    const auto rmse_votes = metric_as_observer(vectors, MetricId::Rmse, pairs);
    REQUIRE(rmse_votes.size() == 3);
    CHECK(rmse_votes[0].chosen == Choice::A);
    CHECK(rmse_votes[1].chosen == Choice::Tie);
    CHECK(rmse_votes[2].chosen == Choice::A);
    CHECK(rmse_votes[0].observer_id == "rmse");
    const auto psnr_votes = metric_as_observer(vectors, MetricId::Psnr, pairs);
    CHECK(psnr_votes[0].chosen == Choice::A);
    CHECK(psnr_votes[1].chosen == Choice::B);

    // the tie earns half the weight of its slot
    std::vector<ChoiceRecord> panel;
    for (int i = 0; i < 3; ++i) {
        const std::string o = "o" + std::to_string(i);
        panel.push_back(vote(o, "s", "a", "b", Choice::A));
        panel.push_back(vote(o, "s", "b", "c", i < 2 ? Choice::A : Choice::B));
        panel.push_back(vote(o, "s", "a", "c", Choice::A));
    }
    const PreferenceTable table = build_preference_table(panel, key_t1);
    const auto omega = metric_agreement(rmse_votes, table);
    CHECK(*omega.at("rmse") == doctest::Approx((1.0 + 0.5 * (2.0 / 3.0) + 1.0) / (2.0 + 2.0 / 3.0)));

    // strictly increasing transforms leave every choice unchanged
    std::vector<MetricVector> warped = vectors;
    for (auto& v : warped) v.values[MetricId::Rmse] = std::exp(5 * v.values[MetricId::Rmse]) - 3;
    const auto warped_votes = metric_as_observer(warped, MetricId::Rmse, pairs);
    for (std::size_t i = 0; i < 3; ++i) CHECK(warped_votes[i].chosen == rmse_votes[i].chosen);

    CHECK_THROWS_AS(metric_as_observer(vectors, MetricId::Lpips, pairs), ValidationError);
    CHECK_THROWS_AS(metric_as_observer(vectors, MetricId::Rmse, {{key_t1, "s", "a", "zz"}}), ValidationError);

    CHECK(trial_pairs(panel, key_t1).size() == 3);
}

TEST_CASE("coin-flip metric over many pairs") {
    const auto panel = panel_records(9, 1000, 12);
    const PreferenceTable table = build_preference_table(panel, key_t1);
    const auto pairs = trial_pairs(panel, key_t1);
    REQUIRE(pairs.size() == 10000);
    Rng rng = make_rng(13, 0);
    std::vector<MetricVector> vectors;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : pairs)
        for (const auto& m : {p.method_a, p.method_b})
            if (seen.insert({p.scene_id, m}).second)
                vectors.push_back({p.scene_id, m, {{MetricId::Flip, uniform01(rng)}}});
    const auto omega = metric_agreement(metric_as_observer(vectors, MetricId::Flip, pairs), table);
    CHECK(std::abs(*omega.at("flip") - 0.5) <= 0.02);
}
