#include "vaep/ratings.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_map>

#include "vaep/csv.hpp"
#include "vaep/error.hpp"

namespace vaep {

namespace {

const std::vector<std::string> kSeriesColumns = {"player_id", "game_index", "date",
                                                 "r_g",       "r_st",       "r_lt",
                                                 "pass_r",    "dribble_r",  "shot_r"};

struct CategorySums {
    double pass = 0.0;
    double dribble = 0.0;
    double shot = 0.0;
    double other = 0.0;
    double total = 0.0;
};

} // namespace

std::vector<ValuedAction> valued_actions(std::span<const Event> events,
                                         std::span<const ActionValue> values) {
    std::vector<ValuedAction> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        if (v.event_index >= events.size()) {
            throw ValidationError("action value references an unknown event");
        }
        const Event& e = events[v.event_index];
        out.push_back({e.game_id, e.player_id, e.action_type, v.value});
    }
    return out;
}

std::vector<ValuedAction> valued_actions(std::span<const ActionValueRow> rows,
                                         FeatureVariant variant) {
    std::vector<ValuedAction> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        const auto& v = variant == FeatureVariant::Intent ? r.i_vaep : r.o_vaep;
        if (v) out.push_back({r.game_id, r.player_id, r.action_type, *v});
    }
    return out;
}

std::vector<GameRating> game_ratings(std::span<const ValuedAction> actions,
                                     std::span<const GameSheet> games,
                                     const RatingOptions& options) {
    std::unordered_map<std::string, const GameSheet*> sheet_of;
    for (const auto& g : games) sheet_of.emplace(g.game_id, &g);

    std::map<std::pair<std::string, std::string>, CategorySums> sums;
    for (const auto& a : actions) {
        auto it = sheet_of.find(a.game_id);
        if (it == sheet_of.end() || !it->second->find(a.player_id)) {
            throw ValidationError("player " + a.player_id + " missing from game sheet of game " +
                                  a.game_id);
        }
        auto& s = sums[{a.player_id, a.game_id}];
        switch (category_of(a.action_type)) {
        case ActionCategory::Pass:
            s.pass += a.value;
            break;
        case ActionCategory::Dribble:
            s.dribble += a.value;
            break;
        case ActionCategory::Shot:
            s.shot += a.value;
            break;
        case ActionCategory::Other:
            s.other += a.value;
            break;
        }
        s.total += a.value;
    }

    std::map<std::string, std::vector<GameRating>> per_player;
    for (const auto& g : games) {
        for (const auto& p : g.players) {
            if (p.position == Position::Goalkeeper || !(p.minutes > options.min_minutes)) {
                continue;
            }
            CategorySums s;
            if (auto it = sums.find({p.player_id, g.game_id}); it != sums.end()) s = it->second;
            GameRating r;
            r.player_id = p.player_id;
            r.game_id = g.game_id;
            r.date = g.date;
            r.minutes = p.minutes;
            r.age = p.age;
            r.pass = s.pass / p.minutes;
            r.dribble = s.dribble / p.minutes;
            r.shot = s.shot / p.minutes;
            r.other = s.other / p.minutes;
            r.total = s.total / p.minutes;
            if (!options.category) {
                r.rating = r.total;
            } else {
                switch (*options.category) {
                case ActionCategory::Pass:
                    r.rating = r.pass;
                    break;
                case ActionCategory::Dribble:
                    r.rating = r.dribble;
                    break;
                case ActionCategory::Shot:
                    r.rating = r.shot;
                    break;
                case ActionCategory::Other:
                    r.rating = r.other;
                    break;
                }
            }
            per_player[p.player_id].push_back(std::move(r));
        }
    }

    std::vector<GameRating> out;
    for (auto& [player, list] : per_player) {
        std::sort(list.begin(), list.end(), [](const GameRating& a, const GameRating& b) {
            if (a.date != b.date) return a.date < b.date;
            return a.game_id < b.game_id;
        });
        for (std::size_t i = 0; i < list.size(); ++i) list[i].game_index = i + 1;
        std::move(list.begin(), list.end(), std::back_inserter(out));
    }
    return out;
}

RollingSeries rolling_mean(std::span<const double> series, std::size_t window,
                           std::size_t min_periods) {
    if (min_periods < 1 || window < min_periods) {
        throw ValidationError("rolling_mean needs window >= min_periods >= 1");
    }
    RollingSeries out(series.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i >= window) sum -= series[i - window];
        const std::size_t count = std::min(i + 1, window);
        if (count >= min_periods) out[i] = sum / static_cast<double>(count);
    }
    return out;
}

void apply_windows(RatingSeries& s, const WindowConfig& w) {
    s.r_st = rolling_mean(s.r_g, w.short_window, w.short_min);
    s.r_lt = rolling_mean(s.r_g, w.long_window, w.long_min);
}

std::vector<RatingSeries> build_series(std::span<const GameRating> ratings,
                                       const WindowConfig& windows) {
    std::map<std::string, std::vector<const GameRating*>> by_player;
    for (const auto& r : ratings) by_player[r.player_id].push_back(&r);

    std::vector<RatingSeries> out;
    out.reserve(by_player.size());
    for (auto& [player, list] : by_player) {
        std::stable_sort(list.begin(), list.end(), [](const GameRating* a, const GameRating* b) {
            return a->game_index < b->game_index;
        });
        RatingSeries s;
        s.player_id = player;
        for (const auto* r : list) {
            s.game_index.push_back(r->game_index);
            s.dates.push_back(r->date);
            s.ages.push_back(r->age);
            s.r_g.push_back(r->rating);
            s.pass.push_back(r->pass);
            s.dribble.push_back(r->dribble);
            s.shot.push_back(r->shot);
        }
        apply_windows(s, windows);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<PeakEntry> top_peaks(std::span<const RatingSeries> series, std::size_t k) {
    std::vector<PeakEntry> peaks;
    for (const auto& s : series) {
        std::optional<PeakEntry> best;
        for (std::size_t i = 0; i < s.r_lt.size(); ++i) {
            if (s.r_lt[i] && (!best || *s.r_lt[i] > best->peak)) {
                best = PeakEntry{s.player_id, *s.r_lt[i], s.game_index[i]};
            }
        }
        if (best) peaks.push_back(std::move(*best));
    }
    std::sort(peaks.begin(), peaks.end(), [](const PeakEntry& a, const PeakEntry& b) {
        if (a.peak != b.peak) return a.peak > b.peak;
        return a.player_id < b.player_id;
    });
    if (peaks.size() > k) peaks.resize(k);
    return peaks;
}

void write_series_csv(std::ostream& out, std::span<const RatingSeries> series) {
    out << csv::join(kSeriesColumns) << '\n';
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << s.player_id << ',' << s.game_index[i] << ',' << s.dates[i].to_string() << ','
                << csv::format_double(s.r_g[i]) << ',' << csv::format_optional(s.r_st[i]) << ','
                << csv::format_optional(s.r_lt[i]) << ',' << csv::format_double(s.pass[i]) << ','
                << csv::format_double(s.dribble[i]) << ',' << csv::format_double(s.shot[i])
                << '\n';
        }
    }
}

std::vector<RatingSeries> read_series_csv(std::istream& in) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw SchemaError("series file is empty");
    }
    csv::expect_header(csv::split_line(line), kSeriesColumns, "series");
    std::vector<RatingSeries> out;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = csv::split_line(line);
        if (f.size() != kSeriesColumns.size()) {
            throw SchemaError("series line " + std::to_string(line_no) + ": expected " +
                              std::to_string(kSeriesColumns.size()) + " fields");
        }
        if (out.empty() || out.back().player_id != f[0]) {
            out.emplace_back();
            out.back().player_id = f[0];
        }
        RatingSeries& s = out.back();
        auto date = Date::parse(f[2]);
        if (!date) {
            throw SchemaError("series line " + std::to_string(line_no) + ": invalid date");
        }
        s.game_index.push_back(static_cast<std::size_t>(csv::parse_int(f[1], "game_index", line_no)));
        s.dates.push_back(*date);
        s.ages.push_back(std::numeric_limits<double>::quiet_NaN());
        s.r_g.push_back(csv::parse_double(f[3], "r_g", line_no));
        s.r_st.push_back(csv::parse_optional_double(f[4], "r_st", line_no));
        s.r_lt.push_back(csv::parse_optional_double(f[5], "r_lt", line_no));
        s.pass.push_back(csv::parse_double(f[6], "pass_r", line_no));
        s.dribble.push_back(csv::parse_double(f[7], "dribble_r", line_no));
        s.shot.push_back(csv::parse_double(f[8], "shot_r", line_no));
    }
    return out;
}

void attach_ages(std::span<RatingSeries> series, std::span<const GameSheet> games) {
    std::map<std::pair<std::string, std::int64_t>, double> age_of;
    for (const auto& g : games) {
        for (const auto& p : g.players) age_of[{p.player_id, g.date.days()}] = p.age;
    }
    for (auto& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (auto it = age_of.find({s.player_id, s.dates[i].days()}); it != age_of.end()) {
                s.ages[i] = it->second;
            }
        }
    }
}

void write_peaks_csv(std::ostream& out, std::span<const PeakEntry> peaks) {
    out << "rank,player_id,peak_r_lt,game_index\n";
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        out << i + 1 << ',' << peaks[i].player_id << ',' << csv::format_double(peaks[i].peak) << ','
            << peaks[i].game_index << '\n';
    }
}

} // namespace vaep
