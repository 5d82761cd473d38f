#include "vaep/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "vaep/csv.hpp"
#include "vaep/error.hpp"

namespace vaep {

namespace {

double masked_stddev(const std::vector<double>& deltas, NegativeMask mask) {
    std::vector<double> kept;
    kept.reserve(deltas.size());
    for (double d : deltas) {
        if (d < 0.0) {
            kept.push_back(d);
        } else if (mask == NegativeMask::Zeroed) {
            kept.push_back(0.0);
        }
    }
    return kept.empty() ? 0.0 : stats::population_stddev(kept);
}

const RollingSeries* rolling_for(const RatingSeries& s, CurveRating which) {
    switch (which) {
    case CurveRating::ShortTerm:
        return &s.r_st;
    case CurveRating::LongTerm:
        return &s.r_lt;
    case CurveRating::Game:
        break;
    }
    return nullptr;
}

// Per-age median of the selected rating for one player.
std::map<int, double> per_age_median(const RatingSeries& s, CurveRating which) {
    std::map<int, std::vector<double>> buckets;
    const RollingSeries* rolling = rolling_for(s, which);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s.ages[i])) continue;
        double value = s.r_g[i];
        if (rolling) {
            if (!(*rolling)[i]) continue;
            value = *(*rolling)[i];
        }
        buckets[static_cast<int>(std::floor(s.ages[i]))].push_back(value);
    }
    std::map<int, double> out;
    for (const auto& [age, values] : buckets) out[age] = stats::median(values);
    return out;
}

} // namespace

VolatilityReport volatility(const RatingSeries& s, NegativeMask mask) {
    std::vector<double> game_delta;
    std::vector<double> short_delta;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.r_lt[i]) continue;
        game_delta.push_back(s.r_g[i] - *s.r_lt[i]);
        if (s.r_st[i]) short_delta.push_back(*s.r_st[i] - *s.r_lt[i]);
    }
    if (game_delta.size() < 2 || short_delta.size() < 2) {
        throw InsufficientData("player " + s.player_id +
                               " has fewer than two games with defined long-term rating");
    }
    VolatilityReport r;
    r.player_id = s.player_id;
    r.median_rating = stats::median(s.r_g);
    r.game_to_game = stats::population_stddev(game_delta);
    r.negative_game = masked_stddev(game_delta, mask);
    r.negative_short_term = masked_stddev(short_delta, mask);
    return r;
}

std::vector<VolatilityReport> volatility_all(std::span<const RatingSeries> series,
                                             NegativeMask mask) {
    std::vector<VolatilityReport> out;
    for (const auto& s : series) {
        try {
            out.push_back(volatility(s, mask));
        } catch (const InsufficientData&) {
        }
    }
    return out;
}

std::vector<VolatilityReport> adjust_volatility(std::vector<VolatilityReport> reports,
                                                VolatilityFits* fits) {
    if (reports.size() < 3) {
        throw InsufficientData("volatility adjustment needs at least three players");
    }
    std::vector<double> x, g2g, neg_game, neg_st;
    for (const auto& r : reports) {
        x.push_back(r.median_rating);
        g2g.push_back(r.game_to_game);
        neg_game.push_back(r.negative_game);
        neg_st.push_back(r.negative_short_term);
    }
    const auto fit_g2g = stats::fit_ols(x, g2g);
    const auto fit_neg_game = stats::fit_ols(x, neg_game);
    const auto fit_neg_st = stats::fit_ols(x, neg_st);
    for (auto& r : reports) {
        r.adj_game_to_game = r.game_to_game - fit_g2g(r.median_rating);
        r.adj_negative_game = r.negative_game - fit_neg_game(r.median_rating);
        r.adj_negative_short_term = r.negative_short_term - fit_neg_st(r.median_rating);
    }
    if (fits) *fits = {fit_g2g, fit_neg_game, fit_neg_st};
    return reports;
}

int DevelopmentCurve::peak_age() const {
    if (ages.empty()) throw DomainError("empty development curve");
    const auto it = std::max_element(final_curve.begin(), final_curve.end());
    return ages[static_cast<std::size_t>(it - final_curve.begin())];
}

DevelopmentCurve development_curve(std::span<const RatingSeries> series,
                                   const DevelopmentCurveOptions& options) {
    if (options.smoothing_window < 1) {
        throw DomainError("smoothing window must be at least 1");
    }
    DevelopmentCurve curve;
    std::map<int, std::vector<double>> relative_by_age;
    for (const auto& s : series) {
        std::set<int> seasons;
        for (const auto& d : s.dates) seasons.insert(d.season());
        if (seasons.size() < options.min_seasons) continue;

        const auto medians = per_age_median(s, options.rating);
        if (medians.empty()) continue;
        double best = medians.begin()->second;
        for (const auto& [age, m] : medians) best = std::max(best, m);
        if (!(best > 0.0)) {
            ++curve.players_non_positive;
            continue;
        }
        ++curve.players_used;
        for (const auto& [age, m] : medians) relative_by_age[age].push_back(m / best);
    }
    if (relative_by_age.size() < 3) {
        throw DomainError("development curve needs at least three distinct ages, got " +
                          std::to_string(relative_by_age.size()));
    }

    std::size_t max_count = 0;
    for (const auto& [age, values] : relative_by_age) {
        curve.ages.push_back(age);
        curve.unadjusted.push_back(stats::median(values));
        curve.player_counts.push_back(values.size());
        max_count = std::max(max_count, values.size());
    }
    const std::size_t n = curve.ages.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double rel =
            static_cast<double>(curve.player_counts[i]) / static_cast<double>(max_count);
        curve.relative_amount.push_back(rel);
        curve.adjusted.push_back(options.correction == AgeBiasCorrection::ScarcityWeight
                                     ? curve.unadjusted[i] * (1.0 - rel)
                                     : curve.unadjusted[i]);
    }

    // Centered moving average over ages within half a window; edges use the
    // neighbours that exist.
    const int half = static_cast<int>(options.smoothing_window / 2);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(curve.ages[j] - curve.ages[i]) <= half) {
                sum += curve.adjusted[j];
                ++count;
            }
        }
        curve.smoothed.push_back(sum / static_cast<double>(count));
    }

    const auto [lo_it, hi_it] = std::minmax_element(curve.smoothed.begin(), curve.smoothed.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    curve.flat = !(hi > lo);
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.5;
        if (!curve.flat) {
            v = (curve.smoothed[i] - lo) / (hi - lo);
            if (curve.smoothed[i] == hi) v = 1.0;
            if (curve.smoothed[i] == lo) v = 0.0;
        }
        curve.final_curve.push_back(v);
    }
    return curve;
}

std::vector<LateBloomer> late_bloomers(std::span<const RatingSeries> series,
                                       int peak_age_threshold) {
    std::vector<LateBloomer> out;
    for (const auto& s : series) {
        const auto medians = per_age_median(s, CurveRating::LongTerm);
        if (medians.empty()) continue;
        auto best = medians.begin();
        for (auto it = medians.begin(); it != medians.end(); ++it) {
            if (it->second > best->second) best = it;
        }
        if (best->first >= peak_age_threshold) {
            out.push_back({s.player_id, best->first, best->second});
        }
    }
    std::sort(out.begin(), out.end(), [](const LateBloomer& a, const LateBloomer& b) {
        if (a.peak_rating != b.peak_rating) return a.peak_rating > b.peak_rating;
        return a.player_id < b.player_id;
    });
    return out;
}

void write_volatility_csv(std::ostream& out, std::span<const VolatilityReport> reports) {
    out << "player_id,median_rating,g2g,neg_game,neg_st,adj_g2g,adj_neg_game,adj_neg_st\n";
    for (const auto& r : reports) {
        out << r.player_id << ',' << csv::format_double(r.median_rating) << ','
            << csv::format_double(r.game_to_game) << ',' << csv::format_double(r.negative_game)
            << ',' << csv::format_double(r.negative_short_term) << ','
            << csv::format_double(r.adj_game_to_game) << ','
            << csv::format_double(r.adj_negative_game) << ','
            << csv::format_double(r.adj_negative_short_term) << '\n';
    }
}

void write_development_curve_csv(std::ostream& out, const DevelopmentCurve& c) {
    out << "age,unadjusted,player_count,adjusted,final\n";
    for (std::size_t i = 0; i < c.ages.size(); ++i) {
        out << c.ages[i] << ',' << csv::format_double(c.unadjusted[i]) << ','
            << c.player_counts[i] << ',' << csv::format_double(c.adjusted[i]) << ','
            << csv::format_double(c.final_curve[i]) << '\n';
    }
}

void write_late_bloomers_csv(std::ostream& out, std::span<const LateBloomer> players) {
    out << "player_id,peak_age,peak_rating\n";
    for (const auto& p : players) {
        out << p.player_id << ',' << p.peak_age << ',' << csv::format_double(p.peak_rating) << '\n';
    }
}

} // namespace vaep
