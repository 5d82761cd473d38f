#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "vaep/error.hpp"
#include "vaep/event_model.hpp"

using namespace vaep;
using fixture::ev;
using fixture::shot;

namespace {

const char* kHeader = "game_id,period,second,team_id,player_id,action_type,x,y,end_x,end_y,end_z,body_part,outcome\n";

EventTable parse_csv(const std::string& body) {
    std::istringstream in(std::string(kHeader) + body);
    return read_events(in, EventFormat::Csv);
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("vaep_em_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_SUITE("event_model") {

TEST_CASE("action codes are stable and the category map is total") {
    CHECK(action_code(ActionType::Pass) == 0);
    CHECK(action_code(ActionType::KickOff) == 19);
    for (int c = 0; c < kActionTypeCount; ++c) {
        auto t = action_from_code(c);
        CHECK(action_code(t) == c);
        CHECK(parse_action_type(to_string(t)) == t);
        auto cat = category_of(t);
        CHECK((cat == ActionCategory::Pass || cat == ActionCategory::Dribble || cat == ActionCategory::Shot ||
               cat == ActionCategory::Other));
    }
    CHECK(category_of(ActionType::Cross) == ActionCategory::Pass);
    CHECK(category_of(ActionType::TakeOn) == ActionCategory::Dribble);
    CHECK(category_of(ActionType::Carry) == ActionCategory::Dribble);
    CHECK(category_of(ActionType::ShotPenalty) == ActionCategory::Shot);
    CHECK(category_of(ActionType::Tackle) == ActionCategory::Other);
    CHECK_THROWS(action_from_code(20));
}

TEST_CASE("dates and seasons") {
    auto d = Date::parse("2016-02-29");
    REQUIRE(d);
    CHECK(Date::from_days(d->days()) == *d);
    CHECK(d->to_string() == "2016-02-29");
    CHECK(d->season() == 2015);
    CHECK(Date{2016, 7, 1}.season() == 2016);
    CHECK(Date{1970, 1, 1}.days() == 0);
    CHECK_FALSE(Date::parse("2016-02-30"));
    CHECK_FALSE(Date::parse("16-2-3"));
}

TEST_CASE("well-formed three-row CSV parses to three events") {
    auto t = parse_csv("g1,1,0.5,A,a1,pass,50,34,60,30,,foot,1\n"
                       "g1,1,2,B,b1,tackle,45,34,45,34,,foot,1\n"
                       "g1,1,3,A,a2,shot,90,30,105,33,1.2,head,0\n");
    CHECK(t.events.size() == 3);
    CHECK(t.report.rejected_rows == 0);
    CHECK(t.events[2].end_z == doctest::Approx(1.2));
    CHECK(t.events[2].body_part == BodyPart::Head);
    CHECK_FALSE(t.events[0].end_z.has_value());
}

TEST_CASE("out-of-range coordinate rejects the row and counts it") {
    auto t = parse_csv("g1,1,0,A,a1,pass,120,34,60,30,,foot,1\n"
                       "g1,1,1,A,a1,pass,50,34,60,30,,foot,1\n");
    CHECK(t.events.size() == 1);
    CHECK(t.report.rejected_rows == 1);
    CHECK(t.report.accepted_rows == 1);
}

TEST_CASE("end_z outside [0, 10] and bad periods are rejected") {
    auto t = parse_csv("g1,1,0,A,a1,shot,90,34,105,34,11,foot,1\n"
                       "g1,3,0,A,a1,pass,50,34,60,30,,foot,1\n"
                       "g1,1,-1,A,a1,pass,50,34,60,30,,foot,1\n");
    CHECK(t.events.empty());
    CHECK(t.report.rejected_rows == 3);
}

TEST_CASE("schema mismatches throw") {
    std::istringstream bad_header("game_id,period\n");
    CHECK_THROWS_AS(read_events(bad_header, EventFormat::Csv), SchemaError);
    CHECK_THROWS_AS(parse_csv("g1,one,0,A,a1,pass,50,34,60,30,,foot,1\n"), SchemaError);
    CHECK_THROWS_AS(parse_csv("g1,1,0,A,a1,dance,50,34,60,30,,foot,1\n"), SchemaError);
    CHECK_THROWS_AS(parse_csv("g1,1,0,A,a1,pass,50,34\n"), SchemaError);
}

TEST_CASE("overlapping seconds across periods keep per-period order") {
    auto t = parse_csv("g1,1,100,A,a1,pass,50,34,60,30,,foot,1\n"
                       "g1,2,10,B,b1,pass,50,34,60,30,,foot,1\n"
                       "g1,1,200,A,a1,pass,50,34,60,30,,foot,1\n");
    REQUIRE(t.events.size() == 3);
    CHECK(t.report.rejected_rows == 0);
    CHECK(t.events[0].second == 100);
    CHECK(t.events[1].second == 200);
    CHECK(t.events[2].period == 2);
    CHECK_FALSE(t.report.warnings.empty());  // input was not sorted
}

TEST_CASE("sorting is stable for equal timestamps") {
    auto t = parse_csv("g1,1,5,A,first,pass,50,34,60,30,,foot,1\n"
                       "g1,1,1,A,early,pass,50,34,60,30,,foot,1\n"
                       "g1,1,5,B,second,pass,50,34,60,30,,foot,1\n");
    REQUIRE(t.events.size() == 3);
    CHECK(t.events[0].player_id == "early");
    CHECK(t.events[1].player_id == "first");
    CHECK(t.events[2].player_id == "second");
}

TEST_CASE("CSV round trip is bit exact") {
    auto events = fixture::random_stream(5, 4, 40);
    for (auto& e : events) e.own_goal = false;
    std::ostringstream a;
    write_events(a, events);
    std::istringstream in(a.str());
    auto back = read_events(in, EventFormat::Csv);
    CHECK(back.events == events);
    std::ostringstream b;
    write_events(b, back.events);
    CHECK(a.str() == b.str());
}

TEST_CASE("JSONL mirror round trips") {
    auto events = fixture::random_stream(6, 3, 30);
    std::ostringstream a;
    write_events(a, events, EventFormat::Jsonl);
    std::istringstream in(a.str());
    auto back = read_events(in, EventFormat::Jsonl);
    CHECK(back.events == events);
}

TEST_CASE("own_goal column is optional and round trips") {
    std::vector<Event> events{ev("g1", 1, 1, "A", "a1"), ev("g1", 1, 2, "B", "b1", ActionType::Clearance)};
    events[1].own_goal = true;
    std::ostringstream out;
    write_events(out, events);
    CHECK(out.str().substr(0, out.str().find('\n')).ends_with(",own_goal"));
    std::istringstream in(out.str());
    CHECK(read_events(in, EventFormat::Csv).events == events);
}

TEST_CASE("game sheets parse, validate minutes and round trip") {
    std::istringstream in("game_id,date,player_id,minutes,position,age\n"
                          "g1,2020-08-01,a1,90,outfield,24.5\n"
                          "g1,2020-08-01,k1,90,GK,30\n"
                          "g2,2020-08-08,a1,61,outfield,24.52\n");
    auto games = read_game_sheets(in, EventFormat::Csv);
    REQUIRE(games.size() == 2);
    CHECK(games[0].players.size() == 2);
    CHECK(games[0].find("k1")->position == Position::Goalkeeper);
    std::ostringstream out;
    write_game_sheets(out, games);
    std::istringstream again(out.str());
    CHECK(read_game_sheets(again, EventFormat::Csv) == games);

    std::istringstream bad("game_id,date,player_id,minutes,position,age\ng1,2020-08-01,a1,131,outfield,24\n");
    ParseReport report;
    auto none = read_game_sheets(bad, EventFormat::Csv, &report);
    CHECK(report.rejected_rows == 1);
}

TEST_CASE("parse_events reads the sibling games file") {
    TempDir dir;
    std::vector<Event> events{ev("g1", 1, 1, "A", "a1"), ev("g1", 1, 2, "B", "b1"), ev("g1", 2, 1, "A", "a1")};
    std::vector<GameSheet> games{{"g1", {2020, 8, 1}, {{"a1", 90, Position::Outfield, 25}, {"b1", 90, Position::Outfield, 22}}}};
    {
        std::ofstream e(dir.path / "events.csv");
        write_events(e, events);
        std::ofstream g(dir.path / "games.csv");
        write_game_sheets(g, games);
    }
    auto data = parse_events(dir.path / "events.csv", EventFormat::Csv);
    CHECK(data.events.size() == 3);
    CHECK(data.games.size() == 1);
    CHECK(data.report.warnings.empty());
}

TEST_CASE("extract_goals") {
    SUBCASE("no shots, no goals") {
        std::vector<Event> events{ev("g1", 1, 1, "A", "a1"), ev("g1", 1, 2, "B", "b1")};
        CHECK(extract_goals(events).empty());
    }
    SUBCASE("one goal in period 2") {
        std::vector<Event> events{ev("g1", 1, 10, "A", "a1"), ev("g1", 2, 299, "B", "b1"),
                                  shot("g1", 2, 300, "B", "b2", true)};
        auto goals = extract_goals(events);
        REQUIRE(goals.size() == 1);
        CHECK(goals[0].second == 300);
        CHECK(goals[0].period == 2);
        CHECK(goals[0].team_id == "B");
        CHECK(goals[0].ordinal == 2);
    }
    SUBCASE("goals by opposite teams, a missed shot and an own goal") {
        std::vector<Event> events{shot("g1", 1, 10, "A", "a1", true), shot("g1", 1, 20, "B", "b1", false),
                                  shot("g1", 1, 30, "B", "b1", true), ev("g1", 2, 5, "A", "a2", ActionType::Clearance)};
        events[3].own_goal = true;
        auto goals = extract_goals(events);
        REQUIRE(goals.size() == 3);
        CHECK(goals[0].team_id == "A");
        CHECK(goals[1].team_id == "B");
        CHECK(goals[1].ordinal == 2);
        CHECK(goals[2].team_id == "B");
        CHECK(goals[2].own_goal);
    }
    SUBCASE("ordinals restart per game and follow sorted order") {
        auto events = fixture::random_stream(9, 6, 60);
        auto goals = extract_goals(events);
        for (const auto& g : goals) {
            std::size_t begin = g.event_index - g.ordinal;
            CHECK(events[begin].game_id == g.game_id);
            CHECK((begin == 0 || events[begin - 1].game_id != g.game_id));
        }
        for (std::size_t i = 1; i < goals.size(); ++i) {
            if (goals[i].game_id == goals[i - 1].game_id) CHECK(goals[i - 1].ordinal < goals[i].ordinal);
        }
    }
}

TEST_CASE("game and period ranges partition the stream") {
    auto events = fixture::random_stream(3, 5, 50);
    std::size_t covered = 0;
    for (auto r : period_ranges(events)) {
        for (std::size_t i = r.begin; i < r.end; ++i) {
            CHECK(events[i].game_id == events[r.begin].game_id);
            CHECK(events[i].period == events[r.begin].period);
        }
        covered += r.size();
    }
    CHECK(covered == events.size());
    CHECK(game_ranges(events).size() == 5);
}

}
