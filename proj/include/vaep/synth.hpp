#pragma once

// Synthetic league generator with planted ground truth.
//
// Players carry a latent skill, a piecewise-linear aging curve and a per-game
// form volatility. Matches are simulated as possession chains in which action
// success, ball progression and shot conversion depend on the acting
// player's effective skill; shot conversion follows a known logistic model of
// distance to goal and shooting skill, recorded per shot in the ground truth.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vaep/event_model.hpp"
#include "vaep/ratings.hpp"

namespace vaep {

/// Portable random source: mt19937_64 plus hand-rolled transforms, so output
/// does not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    double normal(double mean = 0.0, double sd = 1.0);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

struct ShotModel {
    double intercept = 2.0;
    double skill = 2.0;
    double distance = 0.16;
    double header = -0.6;
    double penalty_intercept = 1.3;
    double freekick_intercept = -0.8;

    /// Planted probability that a shot from (x, y) by a player with the given
    /// effective shooting skill is scored.
    double goal_probability(ActionType type, double x, double y, double shot_skill,
                            BodyPart body) const;
};

struct LeagueConfig {
    std::size_t n_teams = 8;
    std::size_t outfield_per_team = 14;
    std::size_t goalkeepers_per_team = 2;
    std::size_t seasons = 5;
    /// Matchdays per season; every team plays once per matchday.
    std::size_t games_per_season = 14;
    std::size_t events_per_game_min = 160;
    std::size_t events_per_game_max = 240;
    /// Scales the probability of attempting a shot; 0 disables shots.
    double shot_propensity = 1.0;
    int start_year = 2010;
    double peak_age = 26.0;
    std::size_t late_bloomers = 1;
    double late_bloomer_peak_age = 34.0;
    std::uint64_t seed = 1;
    ShotModel shot_model;

    /// Throws ValidationError on invalid counts.
    void validate() const;
};

struct SyntheticPlayer {
    std::string player_id;
    std::string team_id;
    Position position = Position::Outfield;
    double skill = 1.0;
    double pass_skill = 1.0;
    double dribble_skill = 1.0;
    double shot_skill = 1.0;
    double peak_age = 26.0;
    double rise_rate = 0.04;
    double decline_rate = 0.05;
    double volatility = 0.1;
    Date birth_date;
    double retirement_age = 35.0;
    bool late_bloomer = false;
};

/// Skill multiplier at `age`: linear rise to a one-year plateau centred on the
/// peak age, then linear decline; never below 0.2.
double aging_multiplier(const SyntheticPlayer& p, double age);

struct GroundTruth {
    LeagueConfig config;
    std::vector<SyntheticPlayer> players;
    /// Aligned with the sorted event list; set for shot-like events only.
    std::vector<std::optional<double>> shot_probability;
};

struct League {
    std::vector<Event> events;
    std::vector<GameSheet> games;
    GroundTruth truth;
};

/// Deterministic per seed. Events satisfy every event-model invariant and
/// come back sorted.
League generate_league(const LeagueConfig& config);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);

// Rating-level populations for analytics checks that do not need events.

struct CohortConfig {
    std::size_t players = 800;
    double peak_age = 26.0;
    double rise_rate = 0.06;
    double decline_rate = 0.07;
    std::size_t games_per_season = 25;
    double base_rating = 0.01;
    double noise_sd = 0.004;
    std::size_t late_bloomers = 1;
    double late_bloomer_peak_age = 34.0;
    int start_year = 2000;
    std::uint64_t seed = 7;
};

/// Careers with entry ages concentrated at 18-23 and attrition each season,
/// so very young and very old ages are sparsely populated.
std::vector<RatingSeries> generate_development_cohort(const CohortConfig& config,
                                                      std::vector<SyntheticPlayer>* truth = nullptr,
                                                      const WindowConfig& windows = {});

struct VolatilityPopulationConfig {
    std::size_t players = 200;
    std::size_t games = 120;
    double level_mean = 0.01;
    double level_sd = 0.004;
    /// Per-game noise standard deviation is this multiple of the level.
    double noise_per_level = 0.8;
    int start_year = 2000;
    std::uint64_t seed = 11;
};

/// Players whose game-to-game noise grows with their rating level.
std::vector<RatingSeries> generate_volatility_population(const VolatilityPopulationConfig& config,
                                                         const WindowConfig& windows = {});

} // namespace vaep
