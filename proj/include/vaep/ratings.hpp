#pragma once

// Per-game player ratings (value per minute played) and their rolling
// short/long-term means over a game-count index.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vaep/event_model.hpp"
#include "vaep/valuation.hpp"

namespace vaep {

struct ValuedAction {
    std::string game_id;
    std::string player_id;
    ActionType action_type = ActionType::Pass;
    double value = 0.0;
};

std::vector<ValuedAction> valued_actions(std::span<const Event> events,
                                         std::span<const ActionValue> values);
/// Rows lacking a value for `variant` are skipped.
std::vector<ValuedAction> valued_actions(std::span<const ActionValueRow> rows,
                                         FeatureVariant variant);

struct RatingOptions {
    /// Games count only when minutes played is strictly greater.
    double min_minutes = 60.0;
    /// Restrict the headline rating to one action category.
    std::optional<ActionCategory> category;
};

struct GameRating {
    std::string player_id;
    std::string game_id;
    std::size_t game_index = 0;  ///< 1-based count of the player's qualifying games
    Date date;
    double minutes = 0.0;
    double age = 0.0;
    double rating = 0.0;  ///< value per minute (of the selected category, if any)
    double pass = 0.0;
    double dribble = 0.0;
    double shot = 0.0;
    double other = 0.0;
    double total = 0.0;  ///< all categories, per minute
};

/// One rating per (outfield player, game with minutes > min_minutes), sorted
/// by player then game index. Games are ordered by (date, game_id). Throws
/// ValidationError when an action's player is missing from its game sheet.
std::vector<GameRating> game_ratings(std::span<const ValuedAction> actions,
                                     std::span<const GameSheet> games,
                                     const RatingOptions& options = {});

using RollingSeries = std::vector<std::optional<double>>;

/// Entry i is the mean of the last min(i + 1, window) values, defined when
/// that count reaches min_periods.
RollingSeries rolling_mean(std::span<const double> series, std::size_t window,
                           std::size_t min_periods);

struct WindowConfig {
    std::size_t short_window = 10;
    std::size_t short_min = 5;
    std::size_t long_window = 40;
    std::size_t long_min = 20;
};

struct RatingSeries {
    std::string player_id;
    std::vector<std::size_t> game_index;
    std::vector<Date> dates;
    /// Age at each game; NaN when unknown.
    std::vector<double> ages;
    std::vector<double> r_g;
    RollingSeries r_st;
    RollingSeries r_lt;
    std::vector<double> pass;
    std::vector<double> dribble;
    std::vector<double> shot;

    std::size_t size() const { return r_g.size(); }
};

/// Groups ratings by player (sorted by player id) and computes the rolling
/// short- and long-term means.
std::vector<RatingSeries> build_series(std::span<const GameRating> ratings,
                                       const WindowConfig& windows = {});

/// Recomputes r_st and r_lt from r_g.
void apply_windows(RatingSeries& series, const WindowConfig& windows);

struct PeakEntry {
    std::string player_id;
    double peak = 0.0;
    std::size_t game_index = 0;
};

/// Players ranked by their highest defined long-term rating, ties by id.
/// Players without a defined long-term rating are left out.
std::vector<PeakEntry> top_peaks(std::span<const RatingSeries> series, std::size_t k);

void write_series_csv(std::ostream& out, std::span<const RatingSeries> series);
/// Ages are left NaN; see attach_ages.
std::vector<RatingSeries> read_series_csv(std::istream& in);
/// Fills ages from the game sheets by (player, date).
void attach_ages(std::span<RatingSeries> series, std::span<const GameSheet> games);

void write_peaks_csv(std::ostream& out, std::span<const PeakEntry> peaks);

} // namespace vaep
