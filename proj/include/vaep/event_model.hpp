#pragma once

// Canonical on-ball event stream: action taxonomy, events, per-game team
// sheets and the goal records derived from them.
//
// Coordinates are meters on a 105 x 68 pitch, expressed in the acting team's
// attacking frame (x = 105 is the opponent goal line).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vaep {

inline constexpr double kPitchLength = 105.0;
inline constexpr double kPitchWidth = 68.0;
inline constexpr double kMaxEndHeight = 10.0;
inline constexpr double kMaxMinutes = 130.0;

/// Action taxonomy. The integer value of each enumerator is its stable
/// `encType` code and must never be reordered.
enum class ActionType : std::uint8_t {
    Pass = 0,
    Cross = 1,
    ThrowIn = 2,
    FreekickShort = 3,
    FreekickCross = 4,
    CornerShort = 5,
    CornerCross = 6,
    TakeOn = 7,
    Carry = 8,
    Shot = 9,
    ShotFreekick = 10,
    ShotPenalty = 11,
    Tackle = 12,
    Interception = 13,
    Clearance = 14,
    Foul = 15,
    KeeperSave = 16,
    KeeperClaim = 17,
    BadTouch = 18,
    KickOff = 19,
};

inline constexpr int kActionTypeCount = 20;

/// Coarse grouping used for per-category ratings.
enum class ActionCategory : std::uint8_t { Pass, Dribble, Shot, Other };

enum class BodyPart : std::uint8_t { Foot, Head, Other };

enum class Position : std::uint8_t { Goalkeeper, Outfield };

constexpr int action_code(ActionType t) { return static_cast<int>(t); }
ActionType action_from_code(int code);

std::string_view to_string(ActionType t);
std::optional<ActionType> parse_action_type(std::string_view name);

ActionCategory category_of(ActionType t);
std::string_view to_string(ActionCategory c);
std::optional<ActionCategory> parse_action_category(std::string_view name);

bool is_shot_like(ActionType t);

std::string_view to_string(BodyPart b);
std::optional<BodyPart> parse_body_part(std::string_view name);

std::string_view to_string(Position p);
std::optional<Position> parse_position(std::string_view name);

/// Proleptic Gregorian calendar date.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    /// Days since 1970-01-01.
    std::int64_t days() const;
    static Date from_days(std::int64_t days);
    static std::optional<Date> parse(std::string_view iso);
    std::string to_string() const;

    /// Start year of the season (July to June) containing this date.
    int season() const;

    auto operator<=>(const Date&) const = default;
};

struct Event {
    std::string game_id;
    int period = 1;
    double second = 0.0;
    std::string team_id;
    std::string player_id;
    ActionType action_type = ActionType::Pass;
    double x = 0.0;
    double y = 0.0;
    double end_x = 0.0;
    double end_y = 0.0;
    std::optional<double> end_z;
    BodyPart body_part = BodyPart::Foot;
    bool outcome = false;
    /// Optional source marker; a successful own goal credits the other team.
    bool own_goal = false;

    bool operator==(const Event&) const = default;
};

struct PlayerGameEntry {
    std::string player_id;
    double minutes = 0.0;
    Position position = Position::Outfield;
    double age = 0.0;

    bool operator==(const PlayerGameEntry&) const = default;
};

struct GameSheet {
    std::string game_id;
    Date date;
    std::vector<PlayerGameEntry> players;

    const PlayerGameEntry* find(std::string_view player_id) const;
    bool operator==(const GameSheet&) const = default;
};

struct GoalRecord {
    std::string game_id;
    int period = 1;
    double second = 0.0;
    /// Team credited with the goal.
    std::string team_id;
    /// Position of the scoring event in the game's time-sorted event list.
    std::size_t ordinal = 0;
    /// Index of the scoring event in the full event list.
    std::size_t event_index = 0;
    bool own_goal = false;

    bool operator==(const GoalRecord&) const = default;
};

/// Half-open range of indices into a sorted event list.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

enum class EventFormat { Csv, Jsonl };

/// Picks the format from a file extension (`.csv`, `.jsonl`).
EventFormat format_for(const std::filesystem::path& path);

struct ParseReport {
    std::size_t accepted_rows = 0;
    std::size_t rejected_rows = 0;
    std::vector<std::string> warnings;
};

struct EventTable {
    std::vector<Event> events;
    ParseReport report;
};

struct EventData {
    std::vector<Event> events;
    std::vector<GameSheet> games;
    ParseReport report;
};

/// Reads an event stream. Rows violating range invariants are rejected and
/// counted; header or type mismatches throw SchemaError. The result is
/// sorted by (game_id, period, second) with source order as tiebreak.
EventTable read_events(std::istream& in, EventFormat format);

/// Reads the per-game team sheet file (one row per game and player).
std::vector<GameSheet> read_game_sheets(std::istream& in, EventFormat format,
                                        ParseReport* report = nullptr);

/// Reads `path` and its sibling `games.<ext>`.
EventData parse_events(const std::filesystem::path& path, EventFormat format);

void write_events(std::ostream& out, std::span<const Event> events,
                  EventFormat format = EventFormat::Csv);
void write_game_sheets(std::ostream& out, std::span<const GameSheet> games,
                       EventFormat format = EventFormat::Csv);

/// Stable sort by (game_id, period, second). Returns true if the input was
/// already in order.
bool sort_events(std::vector<Event>& events);

/// Checks the per-event range invariants; returns a reason on failure.
std::optional<std::string> check_event(const Event& e);

std::vector<IndexRange> game_ranges(std::span<const Event> events);
std::vector<IndexRange> period_ranges(std::span<const Event> events);

/// One record per scoring event: a successful shot-like action, or an
/// own goal credited to the opponent.
std::vector<GoalRecord> extract_goals(std::span<const Event> events);

void write_goals(std::ostream& out, std::span<const GoalRecord> goals);

const std::vector<std::string>& event_csv_columns();
const std::vector<std::string>& game_sheet_csv_columns();

} // namespace vaep
