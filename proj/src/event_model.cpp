#include "vaep/event_model.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "vaep/csv.hpp"
#include "vaep/error.hpp"

namespace vaep {

namespace {

constexpr std::array<std::string_view, kActionTypeCount> kActionNames = {
    "pass",        "cross",        "throw_in",     "freekick_short", "freekick_cross",
    "corner_short", "corner_cross", "take_on",      "carry",          "shot",
    "shot_freekick", "shot_penalty", "tackle",      "interception",   "clearance",
    "foul",        "keeper_save",  "keeper_claim", "bad_touch",      "kick_off",
};

const std::vector<std::string> kEventColumns = {
    "game_id", "period", "second", "team_id", "player_id", "action_type", "x",
    "y",       "end_x",  "end_y",  "end_z",   "body_part", "outcome"};

const std::vector<std::string> kGameColumns = {"game_id",  "date",     "player_id",
                                               "minutes",  "position", "age"};

constexpr std::string_view kOwnGoalColumn = "own_goal";

} // namespace

ActionType action_from_code(int code) {
    if (code < 0 || code >= kActionTypeCount) {
        throw ValidationError("action code out of range: " + std::to_string(code));
    }
    return static_cast<ActionType>(code);
}

std::string_view to_string(ActionType t) { return kActionNames[static_cast<std::size_t>(t)]; }

std::optional<ActionType> parse_action_type(std::string_view name) {
    for (int i = 0; i < kActionTypeCount; ++i) {
        if (kActionNames[static_cast<std::size_t>(i)] == name) {
            return static_cast<ActionType>(i);
        }
    }
    return std::nullopt;
}

ActionCategory category_of(ActionType t) {
    switch (t) {
    case ActionType::Pass:
    case ActionType::Cross:
    case ActionType::ThrowIn:
    case ActionType::FreekickShort:
    case ActionType::FreekickCross:
    case ActionType::CornerShort:
    case ActionType::CornerCross:
        return ActionCategory::Pass;
    case ActionType::TakeOn:
    case ActionType::Carry:
        return ActionCategory::Dribble;
    case ActionType::Shot:
    case ActionType::ShotFreekick:
    case ActionType::ShotPenalty:
        return ActionCategory::Shot;
    case ActionType::Tackle:
    case ActionType::Interception:
    case ActionType::Clearance:
    case ActionType::Foul:
    case ActionType::KeeperSave:
    case ActionType::KeeperClaim:
    case ActionType::BadTouch:
    case ActionType::KickOff:
        return ActionCategory::Other;
    }
    return ActionCategory::Other;
}

std::string_view to_string(ActionCategory c) {
    switch (c) {
    case ActionCategory::Pass:
        return "pass";
    case ActionCategory::Dribble:
        return "dribble";
    case ActionCategory::Shot:
        return "shot";
    case ActionCategory::Other:
        return "other";
    }
    return "other";
}

std::optional<ActionCategory> parse_action_category(std::string_view name) {
    for (auto c : {ActionCategory::Pass, ActionCategory::Dribble, ActionCategory::Shot,
                   ActionCategory::Other}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

bool is_shot_like(ActionType t) { return category_of(t) == ActionCategory::Shot; }

std::string_view to_string(BodyPart b) {
    switch (b) {
    case BodyPart::Foot:
        return "foot";
    case BodyPart::Head:
        return "head";
    case BodyPart::Other:
        return "other";
    }
    return "other";
}

std::optional<BodyPart> parse_body_part(std::string_view name) {
    if (name == "foot") return BodyPart::Foot;
    if (name == "head") return BodyPart::Head;
    if (name == "other") return BodyPart::Other;
    return std::nullopt;
}

std::string_view to_string(Position p) { return p == Position::Goalkeeper ? "GK" : "outfield"; }

std::optional<Position> parse_position(std::string_view name) {
    if (name == "GK") return Position::Goalkeeper;
    if (name == "outfield") return Position::Outfield;
    return std::nullopt;
}

// Civil-date conversions after H. Hinnant's days_from_civil / civil_from_days.
std::int64_t Date::days() const {
    const std::int64_t y = static_cast<std::int64_t>(year) - (month <= 2 ? 1 : 0);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const std::int64_t yoe = y - era * 400;
    const std::int64_t mp = (month + 9) % 12;
    const std::int64_t doy = (153 * mp + 2) / 5 + day - 1;
    const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

Date Date::from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const int d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    const int m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    const int y = static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
    return Date{y, m, d};
}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        return std::nullopt;
    }
    auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (iso[i] < '0' || iso[i] > '9') return std::nullopt;
            v = v * 10 + (iso[i] - '0');
        }
        return v;
    };
    auto y = digits(0, 4);
    auto m = digits(5, 2);
    auto d = digits(8, 2);
    if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) {
        return std::nullopt;
    }
    Date date{*y, *m, *d};
    if (from_days(date.days()) != date) {
        return std::nullopt;
    }
    return date;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

int Date::season() const { return month >= 7 ? year : year - 1; }

const PlayerGameEntry* GameSheet::find(std::string_view player_id) const {
    for (const auto& p : players) {
        if (p.player_id == player_id) {
            return &p;
        }
    }
    return nullptr;
}

EventFormat format_for(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return EventFormat::Csv;
    if (ext == ".jsonl") return EventFormat::Jsonl;
    throw SchemaError("unsupported event file extension '" + ext + "' (expected .csv or .jsonl)");
}

const std::vector<std::string>& event_csv_columns() { return kEventColumns; }
const std::vector<std::string>& game_sheet_csv_columns() { return kGameColumns; }

std::optional<std::string> check_event(const Event& e) {
    if (e.game_id.empty() || e.team_id.empty() || e.player_id.empty()) {
        return "empty identifier";
    }
    if (e.period != 1 && e.period != 2) {
        return "period must be 1 or 2";
    }
    if (!(e.second >= 0.0)) {
        return "second must be non-negative";
    }
    auto in = [](double v, double hi) { return v >= 0.0 && v <= hi; };
    if (!in(e.x, kPitchLength) || !in(e.end_x, kPitchLength)) {
        return "x coordinate outside [0, 105]";
    }
    if (!in(e.y, kPitchWidth) || !in(e.end_y, kPitchWidth)) {
        return "y coordinate outside [0, 68]";
    }
    if (e.end_z && !in(*e.end_z, kMaxEndHeight)) {
        return "end_z outside [0, 10]";
    }
    return std::nullopt;
}

bool sort_events(std::vector<Event>& events) {
    auto less = [](const Event& a, const Event& b) {
        if (a.game_id != b.game_id) return a.game_id < b.game_id;
        if (a.period != b.period) return a.period < b.period;
        return a.second < b.second;
    };
    if (std::is_sorted(events.begin(), events.end(), less)) {
        return true;
    }
    std::stable_sort(events.begin(), events.end(), less);
    return false;
}

namespace {

Event event_from_fields(const std::vector<std::string>& f, std::size_t line_no, bool has_own_goal) {
    Event e;
    e.game_id = f[0];
    e.period = static_cast<int>(csv::parse_int(f[1], "period", line_no));
    e.second = csv::parse_double(f[2], "second", line_no);
    e.team_id = f[3];
    e.player_id = f[4];
    auto type = parse_action_type(f[5]);
    if (!type) {
        throw SchemaError("line " + std::to_string(line_no) + ": unknown action_type '" + f[5] + "'");
    }
    e.action_type = *type;
    e.x = csv::parse_double(f[6], "x", line_no);
    e.y = csv::parse_double(f[7], "y", line_no);
    e.end_x = csv::parse_double(f[8], "end_x", line_no);
    e.end_y = csv::parse_double(f[9], "end_y", line_no);
    e.end_z = csv::parse_optional_double(f[10], "end_z", line_no);
    auto body = parse_body_part(f[11]);
    if (!body) {
        throw SchemaError("line " + std::to_string(line_no) + ": unknown body_part '" + f[11] + "'");
    }
    e.body_part = *body;
    e.outcome = csv::parse_bool(f[12], "outcome", line_no);
    if (has_own_goal) {
        e.own_goal = csv::parse_bool(f[13], "own_goal", line_no);
    }
    return e;
}

Event event_from_json(const nlohmann::json& j, std::size_t line_no) {
    auto where = [&](const std::string& key) {
        return "line " + std::to_string(line_no) + ": field '" + key + "'";
    };
    auto str = [&](const char* key) -> std::string {
        if (!j.contains(key)) throw SchemaError(where(key) + " missing");
        const auto& v = j.at(key);
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        throw SchemaError(where(key) + " expects a string");
    };
    auto num = [&](const char* key) -> double {
        if (!j.contains(key) || !j.at(key).is_number()) {
            throw SchemaError(where(key) + " expects a number");
        }
        return j.at(key).get<double>();
    };
    Event e;
    e.game_id = str("game_id");
    if (!j.contains("period") || !j.at("period").is_number_integer()) {
        throw SchemaError(where("period") + " expects an integer");
    }
    e.period = j.at("period").get<int>();
    e.second = num("second");
    e.team_id = str("team_id");
    e.player_id = str("player_id");
    auto type = parse_action_type(str("action_type"));
    if (!type) throw SchemaError(where("action_type") + " has an unknown value");
    e.action_type = *type;
    e.x = num("x");
    e.y = num("y");
    e.end_x = num("end_x");
    e.end_y = num("end_y");
    if (j.contains("end_z") && !j.at("end_z").is_null()) {
        e.end_z = num("end_z");
    }
    auto body = parse_body_part(str("body_part"));
    if (!body) throw SchemaError(where("body_part") + " has an unknown value");
    e.body_part = *body;
    const auto& oc = j.contains("outcome") ? j.at("outcome") : nlohmann::json();
    if (oc.is_boolean()) {
        e.outcome = oc.get<bool>();
    } else if (oc.is_number_integer() && (oc.get<int>() == 0 || oc.get<int>() == 1)) {
        e.outcome = oc.get<int>() == 1;
    } else {
        throw SchemaError(where("outcome") + " expects a boolean");
    }
    if (j.contains("own_goal")) {
        const auto& og = j.at("own_goal");
        e.own_goal = og.is_boolean() ? og.get<bool>() : og.get<int>() != 0;
    }
    return e;
}

nlohmann::ordered_json event_to_json(const Event& e) {
    nlohmann::ordered_json j;
    j["game_id"] = e.game_id;
    j["period"] = e.period;
    j["second"] = e.second;
    j["team_id"] = e.team_id;
    j["player_id"] = e.player_id;
    j["action_type"] = std::string(to_string(e.action_type));
    j["x"] = e.x;
    j["y"] = e.y;
    j["end_x"] = e.end_x;
    j["end_y"] = e.end_y;
    j["end_z"] = e.end_z ? nlohmann::ordered_json(*e.end_z) : nlohmann::ordered_json(nullptr);
    j["body_part"] = std::string(to_string(e.body_part));
    j["outcome"] = e.outcome;
    if (e.own_goal) {
        j["own_goal"] = true;
    }
    return j;
}

} // namespace

EventTable read_events(std::istream& in, EventFormat format) {
    EventTable table;
    std::string line;
    std::size_t line_no = 0;
    auto accept = [&](Event&& e, std::size_t ln) {
        if (auto reason = check_event(e)) {
            ++table.report.rejected_rows;
            table.report.warnings.push_back("line " + std::to_string(ln) + " rejected: " + *reason);
            return;
        }
        ++table.report.accepted_rows;
        table.events.push_back(std::move(e));
    };

    if (format == EventFormat::Csv) {
        if (!csv::read_line(in, line)) {
            throw SchemaError("event file is empty");
        }
        ++line_no;
        auto header = csv::split_line(line);
        bool has_own_goal = false;
        if (header.size() == kEventColumns.size() + 1 && header.back() == kOwnGoalColumn) {
            has_own_goal = true;
            header.pop_back();
        }
        csv::expect_header(header, kEventColumns, "events");
        const std::size_t width = kEventColumns.size() + (has_own_goal ? 1 : 0);
        while (csv::read_line(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto fields = csv::split_line(line);
            if (fields.size() != width) {
                throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(width) + " fields, got " +
                                  std::to_string(fields.size()));
            }
            accept(event_from_fields(fields, line_no, has_own_goal), line_no);
        }
    } else {
        while (csv::read_line(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& err) {
                throw SchemaError("line " + std::to_string(line_no) + ": invalid JSON: " + err.what());
            }
            if (!j.is_object()) {
                throw SchemaError("line " + std::to_string(line_no) + ": expected a JSON object");
            }
            accept(event_from_json(j, line_no), line_no);
        }
    }

    if (!sort_events(table.events)) {
        table.report.warnings.push_back("input was not sorted by (game_id, period, second); sorted");
    }
    return table;
}

std::vector<GameSheet> read_game_sheets(std::istream& in, EventFormat format, ParseReport* report) {
    std::vector<GameSheet> games;
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;

    auto add = [&](const std::string& game_id, Date date, PlayerGameEntry entry, std::size_t ln) {
        if (!(entry.minutes >= 0.0 && entry.minutes <= kMaxMinutes) || !(entry.age > 0.0) ||
            entry.player_id.empty() || game_id.empty()) {
            if (report) {
                ++report->rejected_rows;
                report->warnings.push_back("games line " + std::to_string(ln) +
                                           " rejected: minutes outside [0, 130] or bad identifiers");
            }
            return;
        }
        auto it = index.find(game_id);
        if (it == index.end()) {
            it = index.emplace(game_id, games.size()).first;
            games.push_back(GameSheet{game_id, date, {}});
        }
        GameSheet& sheet = games[it->second];
        if (sheet.date != date) {
            throw ValidationError("game " + game_id + " has conflicting dates");
        }
        if (sheet.find(entry.player_id)) {
            throw ValidationError("game " + game_id + " lists player " + entry.player_id + " twice");
        }
        sheet.players.push_back(std::move(entry));
    };

    auto parse_date = [&](const std::string& s, std::size_t ln) {
        auto d = Date::parse(s);
        if (!d) {
            throw SchemaError("games line " + std::to_string(ln) + ": invalid date '" + s + "'");
        }
        return *d;
    };
    auto parse_pos = [&](const std::string& s, std::size_t ln) {
        auto p = parse_position(s);
        if (!p) {
            throw SchemaError("games line " + std::to_string(ln) + ": unknown position '" + s + "'");
        }
        return *p;
    };

    if (format == EventFormat::Csv) {
        if (!csv::read_line(in, line)) {
            throw SchemaError("games file is empty");
        }
        ++line_no;
        csv::expect_header(csv::split_line(line), kGameColumns, "games");
        while (csv::read_line(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto f = csv::split_line(line);
            if (f.size() != kGameColumns.size()) {
                throw SchemaError("games line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(kGameColumns.size()) + " fields");
            }
            PlayerGameEntry entry{f[2], csv::parse_double(f[3], "minutes", line_no),
                                  parse_pos(f[4], line_no), csv::parse_double(f[5], "age", line_no)};
            add(f[0], parse_date(f[1], line_no), std::move(entry), line_no);
        }
    } else {
        while (csv::read_line(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
                PlayerGameEntry entry{j.at("player_id").get<std::string>(),
                                      j.at("minutes").get<double>(),
                                      parse_pos(j.at("position").get<std::string>(), line_no),
                                      j.at("age").get<double>()};
                add(j.at("game_id").get<std::string>(),
                    parse_date(j.at("date").get<std::string>(), line_no), std::move(entry), line_no);
            } catch (const nlohmann::json::exception& err) {
                throw SchemaError("games line " + std::to_string(line_no) + ": " + err.what());
            }
        }
    }
    return games;
}

EventData parse_events(const std::filesystem::path& path, EventFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open event file " + path.string());
    }
    auto sibling = path.parent_path() / (format == EventFormat::Csv ? "games.csv" : "games.jsonl");
    std::ifstream gin(sibling);
    if (!gin) {
        throw Error("cannot open game sheet file " + sibling.string());
    }

    EventData data;
    auto table = read_events(in, format);
    data.events = std::move(table.events);
    data.report = std::move(table.report);
    data.games = read_game_sheets(gin, format, &data.report);

    std::unordered_map<std::string, const GameSheet*> by_id;
    for (const auto& g : data.games) {
        by_id.emplace(g.game_id, &g);
    }
    std::set<std::pair<std::string, std::string>> missing;
    for (const auto& e : data.events) {
        auto it = by_id.find(e.game_id);
        if (it == by_id.end() || !it->second->find(e.player_id)) {
            missing.emplace(e.game_id, e.player_id);
        }
    }
    for (const auto& [game, player] : missing) {
        data.report.warnings.push_back("player " + player + " of game " + game +
                                       " missing from game sheet");
    }
    return data;
}

void write_events(std::ostream& out, std::span<const Event> events, EventFormat format) {
    if (format == EventFormat::Jsonl) {
        for (const auto& e : events) {
            out << event_to_json(e).dump() << '\n';
        }
        return;
    }
    const bool own_goal_column =
        std::any_of(events.begin(), events.end(), [](const Event& e) { return e.own_goal; });
    out << csv::join(kEventColumns);
    if (own_goal_column) out << ',' << kOwnGoalColumn;
    out << '\n';
    for (const auto& e : events) {
        out << e.game_id << ',' << e.period << ',' << csv::format_double(e.second) << ','
            << e.team_id << ',' << e.player_id << ',' << to_string(e.action_type) << ','
            << csv::format_double(e.x) << ',' << csv::format_double(e.y) << ','
            << csv::format_double(e.end_x) << ',' << csv::format_double(e.end_y) << ','
            << csv::format_optional(e.end_z) << ',' << to_string(e.body_part) << ','
            << (e.outcome ? 1 : 0);
        if (own_goal_column) out << ',' << (e.own_goal ? 1 : 0);
        out << '\n';
    }
}

void write_game_sheets(std::ostream& out, std::span<const GameSheet> games, EventFormat format) {
    if (format == EventFormat::Csv) {
        out << csv::join(kGameColumns) << '\n';
    }
    for (const auto& g : games) {
        for (const auto& p : g.players) {
            if (format == EventFormat::Csv) {
                out << g.game_id << ',' << g.date.to_string() << ',' << p.player_id << ','
                    << csv::format_double(p.minutes) << ',' << to_string(p.position) << ','
                    << csv::format_double(p.age) << '\n';
            } else {
                nlohmann::ordered_json j;
                j["game_id"] = g.game_id;
                j["date"] = g.date.to_string();
                j["player_id"] = p.player_id;
                j["minutes"] = p.minutes;
                j["position"] = std::string(to_string(p.position));
                j["age"] = p.age;
                out << j.dump() << '\n';
            }
        }
    }
}

std::vector<IndexRange> game_ranges(std::span<const Event> events) {
    std::vector<IndexRange> ranges;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= events.size(); ++i) {
        if (i == events.size() || events[i].game_id != events[begin].game_id) {
            if (i > begin) ranges.push_back({begin, i});
            begin = i;
        }
    }
    return ranges;
}

std::vector<IndexRange> period_ranges(std::span<const Event> events) {
    std::vector<IndexRange> ranges;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= events.size(); ++i) {
        if (i == events.size() || events[i].game_id != events[begin].game_id ||
            events[i].period != events[begin].period) {
            if (i > begin) ranges.push_back({begin, i});
            begin = i;
        }
    }
    return ranges;
}

std::vector<GoalRecord> extract_goals(std::span<const Event> events) {
    std::vector<GoalRecord> goals;
    for (const auto& game : game_ranges(events)) {
        // The opponent of an own-goal scorer is the other team seen in the game.
        std::vector<std::string> teams;
        for (std::size_t i = game.begin; i < game.end; ++i) {
            if (std::find(teams.begin(), teams.end(), events[i].team_id) == teams.end()) {
                teams.push_back(events[i].team_id);
            }
        }
        for (std::size_t i = game.begin; i < game.end; ++i) {
            const Event& e = events[i];
            GoalRecord g{e.game_id, e.period, e.second, e.team_id, i - game.begin, i, false};
            if (e.own_goal && e.outcome) {
                auto other = std::find_if(teams.begin(), teams.end(),
                                          [&](const std::string& t) { return t != e.team_id; });
                if (other == teams.end()) {
                    continue;
                }
                g.team_id = *other;
                g.own_goal = true;
                goals.push_back(std::move(g));
            } else if (is_shot_like(e.action_type) && e.outcome) {
                goals.push_back(std::move(g));
            }
        }
    }
    return goals;
}

void write_goals(std::ostream& out, std::span<const GoalRecord> goals) {
    out << "game_id,period,second,team_id,ordinal,event_index,own_goal\n";
    for (const auto& g : goals) {
        out << g.game_id << ',' << g.period << ',' << csv::format_double(g.second) << ','
            << g.team_id << ',' << g.ordinal << ',' << g.event_index << ','
            << (g.own_goal ? 1 : 0) << '\n';
    }
}

} // namespace vaep
