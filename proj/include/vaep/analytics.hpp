#pragma once

// Rating volatility and the age-based player development curve.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vaep/ratings.hpp"
#include "vaep/stats.hpp"

namespace vaep {

/// How the negative-deviation metrics treat non-negative deviations.
enum class NegativeMask {
    Zeroed,   ///< keep them as zeros in the vector (default)
    Dropped,  ///< remove them before taking the standard deviation
};

struct VolatilityReport {
    std::string player_id;
    double median_rating = 0.0;
    /// sigma(r_g - r_lt)
    double game_to_game = 0.0;
    /// sigma of the negative part of (r_g - r_lt)
    double negative_game = 0.0;
    /// sigma of the negative part of (r_st - r_lt)
    double negative_short_term = 0.0;
    double adj_game_to_game = 0.0;
    double adj_negative_game = 0.0;
    double adj_negative_short_term = 0.0;
};

/// Raw volatility metrics (population standard deviations). Throws
/// InsufficientData unless at least two games have both operands defined.
VolatilityReport volatility(const RatingSeries& series, NegativeMask mask = NegativeMask::Zeroed);

/// Volatility for every series with enough defined entries; others are skipped.
std::vector<VolatilityReport> volatility_all(std::span<const RatingSeries> series,
                                             NegativeMask mask = NegativeMask::Zeroed);

struct VolatilityFits {
    stats::LinearFit game_to_game;
    stats::LinearFit negative_game;
    stats::LinearFit negative_short_term;
};

/// Regresses each raw metric on the median rating and stores the residuals
/// in the adjusted fields. Needs at least three players.
std::vector<VolatilityReport> adjust_volatility(std::vector<VolatilityReport> reports,
                                                VolatilityFits* fits = nullptr);

enum class CurveRating { Game, ShortTerm, LongTerm };

enum class AgeBiasCorrection {
    ScarcityWeight,  ///< multiply by (1 - players(age) / max players)
    None,
};

struct DevelopmentCurveOptions {
    std::size_t smoothing_window = 3;
    CurveRating rating = CurveRating::Game;
    AgeBiasCorrection correction = AgeBiasCorrection::ScarcityWeight;
    /// Players need games in more than this many seasons minus one.
    std::size_t min_seasons = 2;
};

struct DevelopmentCurve {
    std::vector<int> ages;
    std::vector<double> unadjusted;
    std::vector<std::size_t> player_counts;
    std::vector<double> relative_amount;
    std::vector<double> adjusted;
    std::vector<double> smoothed;
    /// Smoothed curve min-max normalised to [0, 1]; all 0.5 when flat.
    std::vector<double> final_curve;
    bool flat = false;
    std::size_t players_used = 0;
    /// Players dropped because their best per-age median was not positive.
    std::size_t players_non_positive = 0;

    int peak_age() const;
};

/// Throws DomainError when fewer than three distinct ages remain.
DevelopmentCurve development_curve(std::span<const RatingSeries> series,
                                   const DevelopmentCurveOptions& options = {});

struct LateBloomer {
    std::string player_id;
    int peak_age = 0;
    double peak_rating = 0.0;
};

/// Players whose per-age median long-term rating peaks at or after
/// `peak_age_threshold`, ranked by peak rating.
std::vector<LateBloomer> late_bloomers(std::span<const RatingSeries> series,
                                       int peak_age_threshold = 30);

void write_volatility_csv(std::ostream& out, std::span<const VolatilityReport> reports);
void write_development_curve_csv(std::ostream& out, const DevelopmentCurve& curve);
void write_late_bloomers_csv(std::ostream& out, std::span<const LateBloomer> players);

} // namespace vaep
