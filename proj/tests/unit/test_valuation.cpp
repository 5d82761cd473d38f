#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vaep/error.hpp"
#include "vaep/valuation.hpp"

using namespace vaep;
using fixture::ev;

namespace {

std::vector<Event> one_team(std::size_t n, std::string game = "g1", int period = 1) {
    std::vector<Event> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(ev(game, period, double(i), "A", "a1"));
    return out;
}

} // namespace

TEST_SUITE("valuation") {

TEST_CASE("lag-2 worked example") {
    auto events = one_team(4);
    std::vector<double> p{0.1, 0.2, 0.3, 0.1};
    auto v = lag2_differences(events, p);
    CHECK(v[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(v[2] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(v[3] == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("constant predictions give c, c, then zeros") {
    auto events = one_team(9);
    std::vector<double> p(9, 0.37);
    auto v = lag2_differences(events, p);
    CHECK(v[0] == 0.37);
    CHECK(v[1] == 0.37);
    for (std::size_t i = 2; i < v.size(); ++i) CHECK(v[i] == 0.0);
}

TEST_CASE("opponent's earlier prediction is re-signed") {
    std::vector<Event> events{ev("g", 1, 0, "A", "a"), ev("g", 1, 1, "A", "a"), ev("g", 1, 2, "B", "b")};
    std::vector<double> p{0.4, 0.1, 0.3};
    auto v = lag2_differences(events, p);
    CHECK(v[2] == doctest::Approx(0.7));
}

TEST_CASE("no leakage across periods or games") {
    std::vector<Event> events{ev("g1", 1, 0, "A", "a"), ev("g1", 1, 1, "A", "a"), ev("g1", 1, 2, "A", "a"),
                              ev("g1", 2, 0, "A", "a"), ev("g1", 2, 1, "A", "a"), ev("g1", 2, 2, "A", "a"),
                              ev("g2", 1, 0, "A", "a"), ev("g2", 1, 1, "A", "a")};
    std::vector<double> p{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    auto v = lag2_differences(events, p);
    CHECK(v[3] == 0.4);
    CHECK(v[4] == 0.5);
    CHECK(v[5] == doctest::Approx(0.2));
    CHECK(v[6] == 0.7);
    CHECK(v[7] == 0.8);
}

TEST_CASE("telescoping: one-team period sums to the last two predictions") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + rng.index(60);
        auto events = one_team(n);
        std::vector<double> p;
        for (std::size_t i = 0; i < n; ++i) p.push_back(rng.uniform(-1, 1));
        auto v = lag2_differences(events, p);
        double sum = 0;
        for (double x : v) sum += x;
        CHECK(sum == doctest::Approx(p[n - 1] + p[n - 2]).epsilon(1e-12));
    }
}

TEST_CASE("random streams agree with the independent lag-2 oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto events = fixture::random_stream(seed, 4, 50);
        Rng rng(seed * 7);
        std::vector<double> p;
        for (std::size_t i = 0; i < events.size(); ++i) p.push_back(rng.uniform(-1, 1));
        CHECK(lag2_differences(events, p) == oracle::lag2(events, p));
    }
}

TEST_CASE("kick-offs are dropped from action values") {
    std::vector<Event> events{ev("g", 1, 0, "A", "a", ActionType::KickOff), ev("g", 1, 1, "A", "a"),
                              ev("g", 1, 2, "B", "b"), ev("g", 2, 0, "B", "b", ActionType::KickOff),
                              ev("g", 2, 1, "B", "b")};
    std::vector<double> p{0.1, 0.2, 0.3, 0.4, 0.5};
    auto vals = action_values(events, p, FeatureVariant::OutcomeAware);
    REQUIRE(vals.size() == 3);
    CHECK(vals[0].event_index == 1);
    CHECK(vals[1].event_index == 2);
    CHECK(vals[1].value == doctest::Approx(0.4));
    CHECK(vals[2].event_index == 4);
    CHECK(vals[2].variant == FeatureVariant::OutcomeAware);
    CHECK_THROWS_AS(action_values(events, std::vector<double>{0.1}, FeatureVariant::Intent), ValidationError);
}

TEST_CASE("join and CSV round trip") {
    std::vector<Event> events{ev("g", 1, 0, "A", "a1", ActionType::KickOff), ev("g", 1, 1, "A", "a2"),
                              ev("g", 1, 2, "B", "b1", ActionType::Shot)};
    auto iv = action_values(events, std::vector<double>{0.1, 0.25, -0.125}, FeatureVariant::Intent);
    auto ov = action_values(events, std::vector<double>{0.2, 0.3, 0.0625}, FeatureVariant::OutcomeAware);
    auto rows = join_action_values(events, iv, ov);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].player_id == "a2");
    CHECK(rows[1].action_type == ActionType::Shot);
    CHECK(rows[1].i_vaep.has_value());
    CHECK(rows[1].o_vaep.has_value());

    auto only_i = join_action_values(events, iv, {});
    CHECK_FALSE(only_i[0].o_vaep.has_value());

    std::stringstream io;
    write_action_values_csv(io, rows);
    auto back = read_action_values_csv(io);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].game_id == rows[i].game_id);
        CHECK(back[i].event_index == rows[i].event_index);
        CHECK(back[i].player_id == rows[i].player_id);
        CHECK(back[i].action_type == rows[i].action_type);
        CHECK(back[i].i_vaep == rows[i].i_vaep);
        CHECK(back[i].o_vaep == rows[i].o_vaep);
    }
    std::stringstream io2;
    write_action_values_csv(io2, only_i);
    auto back2 = read_action_values_csv(io2);
    CHECK_FALSE(back2[0].o_vaep.has_value());
}

}
