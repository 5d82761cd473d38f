#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "vaep/error.hpp"
#include "vaep/labeling.hpp"
#include "vaep/synth.hpp"

using namespace vaep;

namespace {

LeagueConfig small(std::uint64_t seed = 5) {
    LeagueConfig c;
    c.n_teams = 4;
    c.seasons = 2;
    c.games_per_season = 6;
    c.seed = seed;
    return c;
}

std::string dump(const League& l) {
    std::ostringstream out;
    write_events(out, l.events);
    write_game_sheets(out, l.games);
    write_ground_truth(out, l.truth);
    return out.str();
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("rng is reproducible and in range") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(a.index(7) == b.index(7));
    }
    Rng c(1);
    double s = 0, ss = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double z = c.normal(2.0, 0.5);
        s += z;
        ss += z * z;
    }
    double m = s / n;
    CHECK(m == doctest::Approx(2.0).epsilon(0.02));
    CHECK(std::sqrt(ss / n - m * m) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("same seed, byte-identical output; different seed, different output") {
    auto a = dump(generate_league(small(5)));
    auto b = dump(generate_league(small(5)));
    auto c = dump(generate_league(small(6)));
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("generated events satisfy the event model and re-parse without rejections") {
    auto league = generate_league(small());
    CHECK_FALSE(league.events.empty());
    for (const auto& e : league.events) CHECK_FALSE(check_event(e).has_value());
    auto copy = league.events;
    CHECK(sort_events(copy));

    std::stringstream io;
    write_events(io, league.events);
    auto table = read_events(io, EventFormat::Csv);
    CHECK(table.report.rejected_rows == 0);
    CHECK(table.events == league.events);

    std::stringstream gs;
    write_game_sheets(gs, league.games);
    ParseReport rep;
    auto sheets = read_game_sheets(gs, EventFormat::Csv, &rep);
    CHECK(rep.rejected_rows == 0);
    CHECK(sheets == league.games);
}

TEST_CASE("league structure") {
    auto cfg = small();
    auto league = generate_league(cfg);
    CHECK(league.games.size() == cfg.seasons * cfg.games_per_season * cfg.n_teams / 2);
    std::map<std::string, std::size_t> per_game;
    for (const auto& e : league.events) ++per_game[e.game_id];
    CHECK(per_game.size() == league.games.size());
    for (const auto& [g, n] : per_game) {
        CHECK(n >= cfg.events_per_game_min);
        CHECK(n <= cfg.events_per_game_max + 40);
    }
    std::set<std::string> ids;
    for (const auto& p : league.truth.players) ids.insert(p.player_id);
    for (const auto& g : league.games) {
        std::set<std::string> teams;
        for (const auto& p : g.players) {
            CHECK(ids.count(p.player_id) == 1);
            CHECK(p.minutes >= 0.0);
            CHECK(p.minutes <= 130.0);
        }
    }
    for (const auto& e : league.events) {
        if (e.player_id.empty()) continue;
        const auto& sheet = *std::find_if(league.games.begin(), league.games.end(),
                                          [&](const GameSheet& g) { return g.game_id == e.game_id; });
        CHECK(sheet.find(e.player_id) != nullptr);
    }
    std::size_t planted = 0;
    for (const auto& p : league.truth.players) planted += p.late_bloomer;
    CHECK(planted == cfg.late_bloomers);
}

TEST_CASE("shot probabilities are recorded for shots only") {
    auto league = generate_league(small());
    REQUIRE(league.truth.shot_probability.size() == league.events.size());
    std::size_t shots = 0;
    for (std::size_t i = 0; i < league.events.size(); ++i) {
        const auto& p = league.truth.shot_probability[i];
        CHECK(p.has_value() == is_shot_like(league.events[i].action_type));
        if (p) {
            ++shots;
            CHECK(*p > 0.0);
            CHECK(*p < 1.0);
        }
    }
    CHECK(shots > 0);
}

TEST_CASE("shot model: closer and more skilled shooters score more often") {
    ShotModel m;
    double near = m.goal_probability(ActionType::Shot, 95, 34, 1.0, BodyPart::Foot);
    double far = m.goal_probability(ActionType::Shot, 80, 34, 1.0, BodyPart::Foot);
    double skilled = m.goal_probability(ActionType::Shot, 80, 34, 1.5, BodyPart::Foot);
    double header = m.goal_probability(ActionType::Shot, 95, 34, 1.0, BodyPart::Head);
    CHECK(near > far);
    CHECK(skilled > far);
    CHECK(header < near);
}

TEST_CASE("shot propensity 0: no goals and all-zero labels") {
    auto cfg = small();
    cfg.shot_propensity = 0.0;
    auto league = generate_league(cfg);
    for (const auto& e : league.events) CHECK_FALSE(is_shot_like(e.action_type));
    auto goals = extract_goals(league.events);
    CHECK(goals.empty());
    for (auto scheme : {LabelScheme::GoalProximity, LabelScheme::NextK}) {
        for (const auto& s : label_dataset(league.events, goals, scheme)) CHECK(s.label == 0.0);
    }
}

TEST_CASE("labels on a generated game match the oracle") {
    auto league = generate_league(small(9));
    std::vector<Event> first;
    for (const auto& e : league.events) {
        if (e.game_id == league.events.front().game_id) first.push_back(e);
    }
    auto goals = extract_goals(first);
    auto got = label_values(label_dataset(first, goals, LabelScheme::GoalProximity));
    auto want = oracle::eq1_labels(first);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("aging multiplier shape") {
    SyntheticPlayer p;
    p.peak_age = 27;
    p.rise_rate = 0.02;
    p.decline_rate = 0.03;
    CHECK(aging_multiplier(p, 27.0) == doctest::Approx(1.0));
    CHECK(aging_multiplier(p, 26.6) == doctest::Approx(1.0));
    CHECK(aging_multiplier(p, 22.0) < aging_multiplier(p, 25.0));
    CHECK(aging_multiplier(p, 33.0) < aging_multiplier(p, 29.0));
    CHECK(aging_multiplier(p, 90.0) == doctest::Approx(0.2));
}

TEST_CASE("config validation") {
    auto c = small();
    c.n_teams = 1;
    CHECK_THROWS_AS(generate_league(c), ValidationError);
    c = small();
    c.events_per_game_max = 10;
    c.events_per_game_min = 20;
    CHECK_THROWS_AS(generate_league(c), ValidationError);
    c = small();
    c.shot_propensity = -1;
    CHECK_THROWS_AS(generate_league(c), ValidationError);
}

TEST_CASE("development cohort and volatility population are seeded") {
    CohortConfig cc;
    cc.players = 50;
    std::vector<SyntheticPlayer> truth;
    auto a = generate_development_cohort(cc, &truth);
    auto b = generate_development_cohort(cc);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 51);
    CHECK(truth.size() == 51);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].r_g == b[i].r_g);
    for (const auto& s : a) {
        CHECK(std::is_sorted(s.dates.begin(), s.dates.end()));
        for (double age : s.ages) {
            CHECK(age >= 15.0);
            CHECK(age <= 40.0);
        }
    }
    auto v = generate_volatility_population(VolatilityPopulationConfig{});
    CHECK(v.size() == 200);
    CHECK(v[0].size() == 120);
}

}
