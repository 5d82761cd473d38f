#include "vaep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "vaep/error.hpp"
#include "vaep/features.hpp"

namespace vaep {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::index on empty range");
    }
    return static_cast<std::size_t>(engine_() % n);
}

double Rng::normal(double mean, double sd) {
    if (spare_) {
        double z = *spare_;
        spare_.reset();
        return mean + sd * z;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    return mean + sd * r * std::cos(a);
}

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double round1(double v) { return std::round(v * 10.0) / 10.0; }
double round2(double v) { return std::round(v * 100.0) / 100.0; }

double clampd(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

} // namespace

double ShotModel::goal_probability(ActionType type, double x, double y, double shot_skill,
                                   BodyPart body) const {
    double d = distance_to_goal(x, y);
    double base = intercept;
    if (type == ActionType::ShotPenalty) {
        base = penalty_intercept;
        d = 0.0;
    } else if (type == ActionType::ShotFreekick) {
        base = freekick_intercept;
        d = std::max(0.0, d - 16.0);
    }
    double z = base + skill * (shot_skill - 1.0) - distance * d;
    if (body == BodyPart::Head) {
        z += header;
    }
    return logistic(z);
}

void LeagueConfig::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("league config: " + what); };
    if (n_teams < 2) fail("n_teams must be at least 2");
    if (outfield_per_team < 1) fail("outfield_per_team must be at least 1");
    if (goalkeepers_per_team < 1) fail("goalkeepers_per_team must be at least 1");
    if (seasons < 1) fail("seasons must be at least 1");
    if (games_per_season < 1) fail("games_per_season must be at least 1");
    if (events_per_game_min < 2) fail("events_per_game_min must be at least 2");
    if (events_per_game_max < events_per_game_min) fail("events_per_game_max below minimum");
    if (!(shot_propensity >= 0.0)) fail("shot_propensity must be non-negative");
    if (!(peak_age >= 18.0 && peak_age <= 38.0)) fail("peak_age outside [18, 38]");
    if (!(late_bloomer_peak_age >= 18.0 && late_bloomer_peak_age <= 38.0)) {
        fail("late_bloomer_peak_age outside [18, 38]");
    }
    if (late_bloomers > n_teams) fail("at most one late bloomer per team");
}

double aging_multiplier(const SyntheticPlayer& p, double age) {
    double m = 1.0;
    if (age < p.peak_age - 0.5) {
        m = 1.0 - p.rise_rate * (p.peak_age - 0.5 - age);
    } else if (age > p.peak_age + 0.5) {
        m = 1.0 - p.decline_rate * (age - p.peak_age - 0.5);
    }
    return std::max(0.2, m);
}

namespace {

constexpr double kDaysPerYear = 365.25;

double age_at(const SyntheticPlayer& p, const Date& d) {
    return static_cast<double>(d.days() - p.birth_date.days()) / kDaysPerYear;
}

Date birth_for_age(const Date& at, double age) {
    return Date::from_days(at.days() - static_cast<std::int64_t>(std::llround(age * kDaysPerYear)));
}

std::string player_name(std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%04zu", n);
    return buf;
}

SyntheticPlayer make_player(Rng& rng, std::size_t serial, const std::string& team,
                            Position pos, double peak_age) {
    SyntheticPlayer p;
    p.player_id = player_name(serial);
    p.team_id = team;
    p.position = pos;
    p.skill = std::exp(rng.normal(0.0, 0.25));
    p.pass_skill = p.skill * std::exp(rng.normal(0.0, 0.08));
    p.dribble_skill = p.skill * std::exp(rng.normal(0.0, 0.08));
    p.shot_skill = p.skill * std::exp(rng.normal(0.0, 0.08));
    p.peak_age = clampd(peak_age + rng.normal(0.0, 0.5), 18.0, 38.0);
    p.rise_rate = rng.uniform(0.01, 0.02);
    p.decline_rate = rng.uniform(0.01, 0.025);
    p.volatility = rng.uniform(0.05, 0.2);
    p.retirement_age = rng.uniform(31.0, 36.0);
    return p;
}

struct GameSide {
    std::size_t team = 0;
    std::vector<std::size_t> starters;  // outfield players, indices into the player table
    std::vector<std::size_t> bench;
    std::size_t keeper = 0;
    struct Sub {
        int minute;
        std::size_t out;
        std::size_t in;
    };
    std::vector<Sub> subs;
    std::vector<std::size_t> on_pitch;  // current outfield players
};

struct Effective {
    double pass = 1.0;
    double dribble = 1.0;
    double shot = 1.0;
    double overall = 1.0;
};

enum class Phase { KickOff, Open, ThrowIn, Corner, FreeKick, Penalty, GoalKick, KeeperBall };

// Simulates one match as alternating possession chains. Coordinates are kept
// in the possessing team's attacking frame and flipped on turnovers.
class MatchSim {
public:
    MatchSim(const LeagueConfig& cfg, Rng& rng, const std::vector<SyntheticPlayer>& players,
             const std::vector<std::string>& team_ids, std::vector<Effective> eff,
             std::vector<Event>& out, std::vector<std::optional<double>>& probs)
        : cfg_(cfg), rng_(rng), players_(players), team_ids_(team_ids), eff_(std::move(eff)),
          out_(out), probs_(probs) {}

    void play(const std::string& game_id, GameSide& home, GameSide& away) {
        game_id_ = game_id;
        sides_[0] = &home;
        sides_[1] = &away;
        for (auto* s : sides_) {
            s->on_pitch = s->starters;
        }
        std::size_t total = cfg_.events_per_game_min +
                            rng_.index(cfg_.events_per_game_max - cfg_.events_per_game_min + 1);
        std::size_t first = total / 2;
        play_period(1, first, 0);
        play_period(2, total - first, 1);
    }

private:
    struct Pending {
        Event e;
        double dt;
        std::optional<double> prob;
    };

    void play_period(int period, std::size_t n_events, int kicking_team) {
        period_ = period;
        pending_.clear();
        target_ = n_events;
        poss_ = kicking_team;
        phase_ = Phase::KickOff;
        carrier_.reset();
        header_next_ = false;
        while (pending_.size() < target_) {
            update_subs();
            step();
        }
        pending_.resize(target_);
        double raw = 0.0;
        for (const auto& p : pending_) raw += p.dt;
        double duration = 2700.0 + rng_.uniform(60.0, 240.0);
        double scale = raw > 0.0 ? duration / raw : 1.0;
        double t = 0.0;
        double last = 0.0;
        bool first = true;
        for (auto& p : pending_) {
            if (!first) t += p.dt * scale;
            first = false;
            double s = std::max(last, round1(t));
            last = s;
            p.e.second = s;
            p.e.period = period;
            out_.push_back(std::move(p.e));
            probs_.push_back(p.prob);
        }
    }

    double minute_now() const {
        double frac = static_cast<double>(pending_.size()) / static_cast<double>(target_);
        return (period_ - 1) * 45.0 + 45.0 * frac;
    }

    void update_subs() {
        double m = minute_now();
        for (auto* s : sides_) {
            for (const auto& sub : s->subs) {
                if (m >= sub.minute) {
                    auto it = std::find(s->on_pitch.begin(), s->on_pitch.end(), sub.out);
                    if (it != s->on_pitch.end()) *it = sub.in;
                }
            }
        }
    }

    GameSide& side(int t) { return *sides_[t]; }

    double team_strength(int t) {
        const auto& on = side(t).on_pitch;
        double sum = 0.0;
        for (auto p : on) sum += eff_[p].overall;
        return on.empty() ? 1.0 : sum / static_cast<double>(on.size());
    }

    std::size_t pick_player(int t, std::optional<std::size_t> exclude = std::nullopt) {
        const auto& on = side(t).on_pitch;
        std::vector<double> w;
        w.reserve(on.size());
        double total = 0.0;
        for (auto p : on) {
            double v = (exclude && *exclude == p && on.size() > 1) ? 0.0 : eff_[p].overall * eff_[p].overall;
            w.push_back(v);
            total += v;
        }
        double r = rng_.uniform() * total;
        for (std::size_t i = 0; i < on.size(); ++i) {
            r -= w[i];
            if (r < 0.0) return on[i];
        }
        return on.back();
    }

    std::size_t best_shooter(int t) {
        const auto& on = side(t).on_pitch;
        return *std::max_element(on.begin(), on.end(), [&](std::size_t a, std::size_t b) {
            return eff_[a].shot < eff_[b].shot;
        });
    }

    void emit(int t, std::size_t player, ActionType type, double x, double y, double ex, double ey,
              bool outcome, double dt, BodyPart body = BodyPart::Foot,
              std::optional<double> ez = std::nullopt, std::optional<double> prob = std::nullopt) {
        Event e;
        e.game_id = game_id_;
        e.team_id = team_ids_[side(t).team];
        e.player_id = players_[player].player_id;
        e.action_type = type;
        e.x = clampd(round1(x), 0.0, kPitchLength);
        e.y = clampd(round1(y), 0.0, kPitchWidth);
        e.end_x = clampd(round1(ex), 0.0, kPitchLength);
        e.end_y = clampd(round1(ey), 0.0, kPitchWidth);
        if (ez) e.end_z = clampd(round2(*ez), 0.0, kMaxEndHeight);
        e.body_part = body;
        e.outcome = outcome;
        pending_.push_back({std::move(e), dt + dt_bonus_, prob});
        dt_bonus_ = 0.0;
    }

    double zone_dt() {
        if (x_ > 70.0) return rng_.uniform(2.0, 6.0);
        if (x_ > 35.0) return rng_.uniform(4.0, 14.0);
        return rng_.uniform(6.0, 20.0);
    }

    // Possession moves to the other team at the given point of the old frame.
    void turnover(double x_old, double y_old) {
        poss_ = 1 - poss_;
        x_ = kPitchLength - x_old;
        y_ = kPitchWidth - y_old;
        carrier_.reset();
        header_next_ = false;
    }

    void step() {
        switch (phase_) {
        case Phase::KickOff: kick_off(); break;
        case Phase::Open: open_play(); break;
        case Phase::ThrowIn: throw_in(); break;
        case Phase::Corner: corner(); break;
        case Phase::FreeKick: free_kick(); break;
        case Phase::Penalty: penalty(); break;
        case Phase::GoalKick: keeper_distribution(true); break;
        case Phase::KeeperBall: keeper_distribution(false); break;
        }
    }

    void kick_off() {
        std::size_t p = pick_player(poss_);
        double ex = 42.0 + rng_.normal(0.0, 2.0);
        double ey = 34.0 + rng_.normal(0.0, 8.0);
        emit(poss_, p, ActionType::KickOff, 52.5, 34.0, ex, ey, true, rng_.uniform(40.0, 70.0));
        x_ = clampd(ex, 1.0, 104.0);
        y_ = clampd(ey, 1.0, 67.0);
        carrier_ = pick_player(poss_, p);
        phase_ = Phase::Open;
    }

    void open_play() {
        std::size_t p = carrier_ ? *carrier_ : pick_player(poss_);
        carrier_ = p;
        const Effective& s = eff_[p];
        double opp = team_strength(1 - poss_);
        double d = distance_to_goal(x_, y_);

        if (header_next_) {
            header_next_ = false;
            if (rng_.bernoulli(0.8 * std::min(1.0, cfg_.shot_propensity))) {
                shoot(p, ActionType::Shot, BodyPart::Head);
                return;
            }
        }
        double u = rng_.uniform();
        if (u < 0.02) {
            emit(poss_, p, ActionType::BadTouch, x_, y_, x_, y_, false, zone_dt());
            turnover(x_, y_);
            phase_ = Phase::Open;
            return;
        }
        if (u < 0.05) {
            int def = 1 - poss_;
            std::size_t f = pick_player(def);
            emit(def, f, ActionType::Foul, kPitchLength - x_, kPitchWidth - y_, kPitchLength - x_,
                 kPitchWidth - y_, false, zone_dt());
            bool in_box = x_ > 88.5 && std::abs(y_ - 34.0) < 20.16;
            phase_ = in_box ? Phase::Penalty : Phase::FreeKick;
            carrier_.reset();
            return;
        }
        double p_shot = 0.0;
        if (d < 32.0) {
            p_shot = std::min(0.9, 0.9 * std::exp(-(d - 8.0) / 8.0)) * cfg_.shot_propensity;
            p_shot = std::min(p_shot, 0.95);
        }
        if (rng_.bernoulli(p_shot)) {
            shoot(p, ActionType::Shot, BodyPart::Foot);
            return;
        }
        bool wide = x_ > 75.0 && std::abs(y_ - 34.0) > 18.0;
        double v = rng_.uniform();
        if (wide && v < 0.5) {
            cross(p, ActionType::Cross, x_, y_, s.pass - opp);
        } else if (v < 0.12) {
            take_on(p, s, opp);
        } else if (v < 0.37) {
            carry(p, s, opp);
        } else {
            pass(p, s, opp);
        }
    }

    void pass(std::size_t p, const Effective& s, double opp) {
        double ex = 0.0;
        double ey = 0.0;
        if (x_ > 70.0) {
            ex = x_ + rng_.uniform(4.0, 16.0) + 4.0 * (s.pass - 1.0);
            ey = y_ + 0.5 * (34.0 - y_) + rng_.normal(0.0, 6.0);
        } else {
            ex = x_ + rng_.normal(7.0 + 10.0 * (s.pass - 1.0), 10.0);
            ey = y_ + rng_.normal(0.0, 12.0);
        }
        ex = clampd(ex, 1.0, 104.0);
        ey = clampd(ey, 1.0, 67.0);
        double len = std::hypot(ex - x_, ey - y_);
        bool into_box = ex > 88.5 && std::abs(ey - 34.0) < 20.16;
        double ok = logistic(1.8 + 3.0 * (s.pass - opp) - 0.04 * std::max(0.0, len - 20.0) -
                             (into_box ? 0.5 : 0.0));
        double dt = zone_dt();
        if (rng_.bernoulli(ok)) {
            emit(poss_, p, ActionType::Pass, x_, y_, ex, ey, true, dt);
            x_ = ex;
            y_ = ey;
            carrier_ = pick_player(poss_, p);
            return;
        }
        if (rng_.bernoulli(0.12)) {
            ey = ey < 34.0 ? 0.0 : kPitchWidth;
            emit(poss_, p, ActionType::Pass, x_, y_, ex, ey, false, dt);
            turnover(ex, ey);
            phase_ = Phase::ThrowIn;
            return;
        }
        emit(poss_, p, ActionType::Pass, x_, y_, ex, ey, false, dt);
        intercept(ex, ey);
    }

    void intercept(double ex, double ey) {
        turnover(ex, ey);
        std::size_t d = pick_player(poss_);
        emit(poss_, d, ActionType::Interception, x_, y_, x_, y_, true, rng_.uniform(0.5, 2.0));
        carrier_ = d;
        phase_ = Phase::Open;
    }

    void tackle(double ex, double ey) {
        turnover(ex, ey);
        std::size_t d = pick_player(poss_);
        emit(poss_, d, ActionType::Tackle, x_, y_, x_, y_, true, rng_.uniform(0.5, 2.0));
        carrier_ = d;
        phase_ = Phase::Open;
    }

    void carry(std::size_t p, const Effective& s, double opp) {
        double ex = clampd(x_ + rng_.normal(6.0 + 4.0 * (s.dribble - 1.0), 3.0), 1.0, 104.0);
        double ey = clampd(y_ + rng_.normal(0.0, 4.0), 1.0, 67.0);
        double ok = logistic(2.4 + 3.0 * (s.dribble - opp));
        bool success = rng_.bernoulli(ok);
        emit(poss_, p, ActionType::Carry, x_, y_, ex, ey, success, zone_dt());
        if (success) {
            x_ = ex;
            y_ = ey;
            if (rng_.bernoulli(0.4)) carrier_ = pick_player(poss_, p);
        } else {
            tackle(ex, ey);
        }
    }

    void take_on(std::size_t p, const Effective& s, double opp) {
        double ex = clampd(x_ + rng_.uniform(2.0, 7.0), 1.0, 104.0);
        double ey = clampd(y_ + rng_.normal(0.0, 3.0), 1.0, 67.0);
        double ok = logistic(0.4 + 3.5 * (s.dribble - opp));
        bool success = rng_.bernoulli(ok);
        emit(poss_, p, ActionType::TakeOn, x_, y_, ex, ey, success, zone_dt());
        if (success) {
            x_ = ex;
            y_ = ey;
        } else {
            tackle(x_, y_);
        }
    }

    void cross(std::size_t p, ActionType type, double sx, double sy, double edge) {
        double ex = clampd(rng_.uniform(94.0, 103.0), 1.0, 104.0);
        double ey = clampd(34.0 + rng_.normal(0.0, 5.0), 1.0, 67.0);
        double ok = logistic(0.2 + 3.0 * edge);
        bool success = rng_.bernoulli(ok);
        emit(poss_, p, type, sx, sy, ex, ey, success, zone_dt());
        if (success) {
            x_ = ex;
            y_ = ey;
            carrier_ = pick_player(poss_, p);
            header_next_ = true;
            phase_ = Phase::Open;
            return;
        }
        turnover(ex, ey);
        if (rng_.bernoulli(0.5)) {
            emit(poss_, side(poss_).keeper, ActionType::KeeperClaim, x_, y_, x_, y_, true,
                 rng_.uniform(0.5, 2.0));
            phase_ = Phase::KeeperBall;
            return;
        }
        clearance();
    }

    void clearance() {
        std::size_t d = pick_player(poss_);
        double ex = clampd(x_ + rng_.uniform(25.0, 45.0), 1.0, 104.0);
        double ey = clampd(y_ + rng_.normal(0.0, 15.0), 1.0, 67.0);
        bool kept = rng_.bernoulli(0.5);
        emit(poss_, d, ActionType::Clearance, x_, y_, ex, ey, kept, rng_.uniform(0.5, 2.0));
        if (kept) {
            x_ = ex;
            y_ = ey;
            carrier_ = pick_player(poss_, d);
            phase_ = Phase::Open;
        } else {
            turnover(ex, ey);
            phase_ = Phase::Open;
        }
    }

    void shoot(std::size_t p, ActionType type, BodyPart body) {
        double prob = cfg_.shot_model.goal_probability(type, x_, y_, eff_[p].shot, body);
        bool goal = rng_.bernoulli(prob);
        double dt = type == ActionType::Shot ? zone_dt() : rng_.uniform(20.0, 40.0);
        double ex = kPitchLength;
        double ey = 34.0;
        std::optional<double> ez;
        enum { Saved, Wide, Blocked } miss = Saved;
        if (goal) {
            double off = 3.66 - rng_.uniform(0.15, 1.2);
            ey = 34.0 + (rng_.bernoulli(0.5) ? off : -off);
            ez = rng_.uniform(0.1, 2.2);
        } else {
            double m = rng_.uniform();
            if (m < 0.45) {
                ey = 34.0 + rng_.uniform(-1.5, 1.5);
                ez = rng_.uniform(0.2, 1.9);
            } else if (m < 0.85 || type == ActionType::ShotPenalty) {
                miss = Wide;
                if (rng_.bernoulli(0.6)) {
                    double off = 3.66 + rng_.uniform(0.4, 6.0);
                    ey = 34.0 + (rng_.bernoulli(0.5) ? off : -off);
                    ez = rng_.uniform(0.0, 3.0);
                } else {
                    ey = 34.0 + rng_.uniform(-3.5, 3.5);
                    ez = rng_.uniform(2.7, 4.5);
                }
            } else {
                miss = Blocked;
                double step = rng_.uniform(1.0, 4.0);
                double dx = kPitchLength - x_;
                double dy = 34.0 - y_;
                double n = std::hypot(dx, dy);
                ex = n > 0.0 ? x_ + dx / n * std::min(step, n) : x_;
                ey = n > 0.0 ? y_ + dy / n * std::min(step, n) : y_;
            }
        }
        emit(poss_, p, type, x_, y_, ex, ey, goal, dt, body, ez, prob);
        if (goal) {
            poss_ = 1 - poss_;
            carrier_.reset();
            phase_ = Phase::KickOff;
            return;
        }
        if (miss == Blocked) {
            turnover(ex, ey);
            clearance();
            return;
        }
        if (miss == Wide) {
            turnover(ex, ey);
            phase_ = Phase::GoalKick;
            return;
        }
        turnover(ex, ey);
        emit(poss_, side(poss_).keeper, ActionType::KeeperSave, x_, y_, x_, y_, true,
             rng_.uniform(0.3, 1.0));
        if (rng_.bernoulli(0.35)) {
            turnover(x_, y_);
            phase_ = Phase::Corner;
        } else {
            phase_ = Phase::KeeperBall;
        }
    }

    void throw_in() {
        std::size_t p = pick_player(poss_);
        double sy = y_ < 34.0 ? 0.0 : kPitchWidth;
        double sx = clampd(x_, 1.0, 104.0);
        double ex = clampd(sx + rng_.normal(3.0, 5.0), 1.0, 104.0);
        double ey = sy == 0.0 ? rng_.uniform(5.0, 15.0) : kPitchWidth - rng_.uniform(5.0, 15.0);
        bool ok = rng_.bernoulli(0.88);
        emit(poss_, p, ActionType::ThrowIn, sx, sy, ex, ey, ok, rng_.uniform(8.0, 20.0));
        if (ok) {
            x_ = ex;
            y_ = ey;
            carrier_ = pick_player(poss_, p);
            phase_ = Phase::Open;
        } else {
            intercept(ex, ey);
        }
    }

    void corner() {
        double sy = rng_.bernoulli(0.5) ? 0.5 : kPitchWidth - 0.5;
        std::size_t p = pick_player(poss_);
        if (rng_.bernoulli(0.75)) {
            double edge = eff_[p].pass - team_strength(1 - poss_) - 0.15;
            pending_dt_bonus(rng_.uniform(20.0, 35.0));
            cross(p, ActionType::CornerCross, kPitchLength - 0.5, sy, edge);
            return;
        }
        double ex = 99.0;
        double ey = sy < 34.0 ? 8.0 : kPitchWidth - 8.0;
        bool ok = rng_.bernoulli(0.92);
        emit(poss_, p, ActionType::CornerShort, kPitchLength - 0.5, sy, ex, ey, ok,
             rng_.uniform(20.0, 35.0));
        if (ok) {
            x_ = ex;
            y_ = ey;
            carrier_ = pick_player(poss_, p);
            phase_ = Phase::Open;
        } else {
            intercept(ex, ey);
        }
    }

    // Adds idle time ahead of the next emitted event.
    void pending_dt_bonus(double extra) { dt_bonus_ += extra; }

    void free_kick() {
        double d = distance_to_goal(x_, y_);
        if (x_ > 75.0 && d < 30.0) {
            std::size_t p = best_shooter(poss_);
            if (rng_.bernoulli(0.5 * std::min(1.0, cfg_.shot_propensity))) {
                shoot(p, ActionType::ShotFreekick, BodyPart::Foot);
            } else {
                double edge = eff_[p].pass - team_strength(1 - poss_);
                cross(p, ActionType::FreekickCross, x_, y_, edge);
            }
            return;
        }
        std::size_t p = pick_player(poss_);
        double ex = clampd(x_ + rng_.normal(5.0, 6.0), 1.0, 104.0);
        double ey = clampd(y_ + rng_.normal(0.0, 8.0), 1.0, 67.0);
        bool ok = rng_.bernoulli(0.92);
        emit(poss_, p, ActionType::FreekickShort, x_, y_, ex, ey, ok, rng_.uniform(15.0, 30.0));
        if (ok) {
            x_ = ex;
            y_ = ey;
            carrier_ = pick_player(poss_, p);
            phase_ = Phase::Open;
        } else {
            intercept(ex, ey);
        }
    }

    void penalty() {
        x_ = 94.0;
        y_ = 34.0;
        std::size_t p = best_shooter(poss_);
        if (cfg_.shot_propensity <= 0.0) {
            // Without shots the award becomes a short free kick.
            phase_ = Phase::FreeKick;
            x_ = 70.0;
            free_kick();
            return;
        }
        shoot(p, ActionType::ShotPenalty, BodyPart::Foot);
    }

    void keeper_distribution(bool goal_kick) {
        std::size_t k = side(poss_).keeper;
        double sx = goal_kick ? 5.5 : clampd(x_, 1.0, 16.0);
        double sy = goal_kick ? 34.0 : clampd(y_, 14.0, 54.0);
        double ex = rng_.uniform(30.0, 65.0);
        double ey = rng_.uniform(8.0, 60.0);
        bool ok = rng_.bernoulli(goal_kick ? 0.55 : 0.7);
        emit(poss_, k, ActionType::Pass, sx, sy, ex, ey, ok,
             goal_kick ? rng_.uniform(15.0, 30.0) : rng_.uniform(4.0, 10.0));
        if (ok) {
            x_ = ex;
            y_ = ey;
            carrier_ = pick_player(poss_);
            phase_ = Phase::Open;
        } else {
            x_ = sx;
            y_ = sy;
            intercept(ex, ey);
        }
    }

    const LeagueConfig& cfg_;
    Rng& rng_;
    const std::vector<SyntheticPlayer>& players_;
    const std::vector<std::string>& team_ids_;
    std::vector<Effective> eff_;
    std::vector<Event>& out_;
    std::vector<std::optional<double>>& probs_;

    std::string game_id_;
    GameSide* sides_[2] = {nullptr, nullptr};
    std::vector<Pending> pending_;
    std::size_t target_ = 0;
    int period_ = 1;
    int poss_ = 0;
    double x_ = 52.5;
    double y_ = 34.0;
    Phase phase_ = Phase::KickOff;
    std::optional<std::size_t> carrier_;
    bool header_next_ = false;
    double dt_bonus_ = 0.0;
};

// Circle-method round robin; returns (home, away) pairs of one round.
std::vector<std::pair<std::size_t, std::size_t>> round_pairs(std::size_t n_teams, std::size_t round) {
    std::size_t n = n_teams + (n_teams % 2);
    std::vector<std::size_t> ring(n);
    std::iota(ring.begin(), ring.end(), 0);
    std::size_t r = round % (n - 1);
    // Rotate every position except the first.
    std::rotate(ring.begin() + 1, ring.begin() + 1 + static_cast<std::ptrdiff_t>((n - 1 - r) % (n - 1)),
                ring.end());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n / 2; ++i) {
        std::size_t a = ring[i];
        std::size_t b = ring[n - 1 - i];
        if (a >= n_teams || b >= n_teams) continue;  // bye
        bool swap = ((round / (n - 1)) + i + r) % 2 == 1;
        pairs.emplace_back(swap ? b : a, swap ? a : b);
    }
    return pairs;
}

} // namespace

League generate_league(const LeagueConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    League league;
    league.truth.config = cfg;
    auto& players = league.truth.players;

    std::vector<std::string> team_ids;
    for (std::size_t t = 0; t < cfg.n_teams; ++t) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "t%02zu", t + 1);
        team_ids.emplace_back(buf);
    }

    auto season_start = [&](std::size_t s) {
        return Date{cfg.start_year + static_cast<int>(s), 8, 15};
    };

    // Rosters hold indices into `players`; retirements append replacements.
    std::vector<std::vector<std::size_t>> outfield(cfg.n_teams);
    std::vector<std::vector<std::size_t>> keepers(cfg.n_teams);
    std::size_t serial = 1;
    Date first = season_start(0);
    for (std::size_t t = 0; t < cfg.n_teams; ++t) {
        for (std::size_t i = 0; i < cfg.goalkeepers_per_team; ++i) {
            auto p = make_player(rng, serial++, team_ids[t], Position::Goalkeeper, cfg.peak_age);
            p.birth_date = birth_for_age(first, rng.uniform(20.0, 33.0));
            p.retirement_age = 38.0;
            keepers[t].push_back(players.size());
            players.push_back(std::move(p));
        }
        for (std::size_t i = 0; i < cfg.outfield_per_team; ++i) {
            auto p = make_player(rng, serial++, team_ids[t], Position::Outfield, cfg.peak_age);
            if (i == 0 && t < cfg.late_bloomers) {
                p.late_bloomer = true;
                p.peak_age = cfg.late_bloomer_peak_age;
                p.rise_rate = 0.06;
                p.decline_rate = 0.03;
                p.skill = std::max(p.skill, 1.3);
                p.pass_skill = p.dribble_skill = p.shot_skill = p.skill;
                p.birth_date = birth_for_age(first, cfg.late_bloomer_peak_age - 5.0);
                p.retirement_age = cfg.late_bloomer_peak_age + 5.0;
            } else {
                p.birth_date = birth_for_age(first, rng.uniform(18.0, 32.0));
            }
            outfield[t].push_back(players.size());
            players.push_back(std::move(p));
        }
    }

    for (std::size_t s = 0; s < cfg.seasons; ++s) {
        if (s > 0) {
            Date start = season_start(s);
            for (std::size_t t = 0; t < cfg.n_teams; ++t) {
                for (auto& slot : outfield[t]) {
                    if (age_at(players[slot], start) >= players[slot].retirement_age) {
                        auto p = make_player(rng, serial++, team_ids[t], Position::Outfield,
                                             cfg.peak_age);
                        p.birth_date = birth_for_age(start, rng.uniform(17.5, 20.5));
                        slot = players.size();
                        players.push_back(std::move(p));
                    }
                }
            }
        }
        for (std::size_t md = 0; md < cfg.games_per_season; ++md) {
            Date date = Date::from_days(season_start(s).days() + 7 * static_cast<std::int64_t>(md));
            auto pairs = round_pairs(cfg.n_teams, md);
            for (std::size_t g = 0; g < pairs.size(); ++g) {
                char gid[32];
                std::snprintf(gid, sizeof gid, "G%02zu%02zu%02zu", s, md, g);
                std::vector<Effective> eff(players.size());
                GameSide sides[2];
                GameSheet sheet;
                sheet.game_id = gid;
                sheet.date = date;
                std::size_t teams[2] = {pairs[g].first, pairs[g].second};
                for (int k = 0; k < 2; ++k) {
                    std::size_t t = teams[k];
                    auto& sd = sides[k];
                    sd.team = t;
                    auto ability = [&](std::size_t idx) {
                        const auto& pl = players[idx];
                        double form = std::exp(rng.normal(0.0, pl.volatility) -
                                               0.5 * pl.volatility * pl.volatility);
                        double m = aging_multiplier(pl, age_at(pl, date)) * form;
                        eff[idx] = {pl.pass_skill * m, pl.dribble_skill * m, pl.shot_skill * m,
                                    pl.skill * m};
                        return eff[idx].overall;
                    };
                    std::vector<std::pair<double, std::size_t>> ranked;
                    for (auto idx : outfield[t]) ranked.emplace_back(ability(idx), idx);
                    std::stable_sort(ranked.begin(), ranked.end(),
                                     [](const auto& a, const auto& b) { return a.first > b.first; });
                    std::size_t n_start = std::min<std::size_t>(10, ranked.size());
                    for (std::size_t i = 0; i < ranked.size(); ++i) {
                        (i < n_start ? sd.starters : sd.bench).push_back(ranked[i].second);
                    }
                    std::size_t best_gk = keepers[t][0];
                    double best = -1.0;
                    for (auto idx : keepers[t]) {
                        double a = ability(idx);
                        if (a > best) {
                            best = a;
                            best_gk = idx;
                        }
                    }
                    sd.keeper = best_gk;
                    std::size_t n_subs = std::min<std::size_t>(3, sd.bench.size());
                    std::vector<std::size_t> candidates = sd.starters;
                    for (std::size_t i = 0; i < n_subs && !candidates.empty(); ++i) {
                        std::size_t pick = rng.index(candidates.size());
                        int minute = 55 + static_cast<int>(rng.index(31));
                        sd.subs.push_back({minute, candidates[pick], sd.bench[i]});
                        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
                    }
                    std::stable_sort(sd.subs.begin(), sd.subs.end(),
                                     [](const auto& a, const auto& b) { return a.minute < b.minute; });
                    auto add = [&](std::size_t idx, double minutes) {
                        sheet.players.push_back({players[idx].player_id, minutes,
                                                 players[idx].position,
                                                 round2(age_at(players[idx], date))});
                    };
                    add(sd.keeper, 90.0);
                    for (auto idx : sd.starters) {
                        double minutes = 90.0;
                        for (const auto& sub : sd.subs) {
                            if (sub.out == idx) minutes = sub.minute;
                        }
                        add(idx, minutes);
                    }
                    for (const auto& sub : sd.subs) add(sub.in, 90.0 - sub.minute);
                }
                MatchSim sim(cfg, rng, players, team_ids, std::move(eff), league.events,
                             league.truth.shot_probability);
                sim.play(gid, sides[0], sides[1]);
                league.games.push_back(std::move(sheet));
            }
        }
    }
    if (!sort_events(league.events)) {
        throw std::logic_error("generator emitted events out of order");
    }
    return league;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    using nlohmann::ordered_json;
    const auto& c = truth.config;
    ordered_json j;
    j["config"] = {
        {"n_teams", c.n_teams},
        {"outfield_per_team", c.outfield_per_team},
        {"goalkeepers_per_team", c.goalkeepers_per_team},
        {"seasons", c.seasons},
        {"games_per_season", c.games_per_season},
        {"events_per_game_min", c.events_per_game_min},
        {"events_per_game_max", c.events_per_game_max},
        {"shot_propensity", c.shot_propensity},
        {"start_year", c.start_year},
        {"peak_age", c.peak_age},
        {"late_bloomers", c.late_bloomers},
        {"late_bloomer_peak_age", c.late_bloomer_peak_age},
        {"seed", c.seed},
    };
    const auto& m = c.shot_model;
    j["shot_model"] = {
        {"form", "logistic(intercept + skill * (shot_skill - 1) - distance * d + header * is_head)"},
        {"intercept", m.intercept},
        {"skill", m.skill},
        {"distance", m.distance},
        {"header", m.header},
        {"penalty_intercept", m.penalty_intercept},
        {"freekick_intercept", m.freekick_intercept},
    };
    ordered_json ps = ordered_json::array();
    for (const auto& p : truth.players) {
        ps.push_back({
            {"player_id", p.player_id},
            {"team_id", p.team_id},
            {"position", std::string(to_string(p.position))},
            {"skill", p.skill},
            {"pass_skill", p.pass_skill},
            {"dribble_skill", p.dribble_skill},
            {"shot_skill", p.shot_skill},
            {"peak_age", p.peak_age},
            {"rise_rate", p.rise_rate},
            {"decline_rate", p.decline_rate},
            {"volatility", p.volatility},
            {"birth_date", p.birth_date.to_string()},
            {"retirement_age", p.retirement_age},
            {"late_bloomer", p.late_bloomer},
        });
    }
    j["players"] = std::move(ps);
    ordered_json probs = ordered_json::array();
    for (const auto& p : truth.shot_probability) {
        if (p) {
            probs.push_back(*p);
        } else {
            probs.push_back(nullptr);
        }
    }
    j["shot_probability"] = std::move(probs);
    out << j.dump(1) << '\n';
}

namespace {

RatingSeries finish_series(std::string id, std::vector<Date> dates, std::vector<double> ages,
                           std::vector<double> r, const WindowConfig& windows) {
    RatingSeries s;
    s.player_id = std::move(id);
    s.dates = std::move(dates);
    s.ages = std::move(ages);
    s.r_g = std::move(r);
    s.game_index.resize(s.r_g.size());
    std::iota(s.game_index.begin(), s.game_index.end(), std::size_t{1});
    s.pass.assign(s.r_g.size(), 0.0);
    s.dribble.assign(s.r_g.size(), 0.0);
    s.shot.assign(s.r_g.size(), 0.0);
    apply_windows(s, windows);
    return s;
}

} // namespace

std::vector<RatingSeries> generate_development_cohort(const CohortConfig& cfg,
                                                      std::vector<SyntheticPlayer>* truth,
                                                      const WindowConfig& windows) {
    if (cfg.players < 1 || cfg.games_per_season < 1) {
        throw ValidationError("cohort config: counts must be at least 1");
    }
    Rng rng(cfg.seed);
    std::vector<RatingSeries> out;
    std::size_t n_total = cfg.players + cfg.late_bloomers;
    for (std::size_t i = 0; i < n_total; ++i) {
        bool late = i >= cfg.players;
        SyntheticPlayer p;
        p.player_id = player_name(i + 1);
        p.team_id = "cohort";
        p.skill = std::exp(rng.normal(0.0, 0.25));
        p.pass_skill = p.dribble_skill = p.shot_skill = p.skill;
        p.peak_age = late ? cfg.late_bloomer_peak_age : cfg.peak_age;
        p.rise_rate = cfg.rise_rate * rng.uniform(0.8, 1.2);
        p.decline_rate = cfg.decline_rate * rng.uniform(0.8, 1.2);
        p.volatility = cfg.noise_sd;
        p.late_bloomer = late;
        double entry_age = late ? cfg.late_bloomer_peak_age - 8.0 : 17.5 + std::abs(rng.normal(0.0, 2.5));
        Date start{cfg.start_year + static_cast<int>(i % 10), 8, 15};
        p.birth_date = birth_for_age(start, entry_age);
        p.retirement_age = late ? cfg.late_bloomer_peak_age + 3.0 : 38.0;

        std::vector<Date> dates;
        std::vector<double> ages;
        std::vector<double> r;
        for (int season = 0;; ++season) {
            Date s0{start.year + season, 8, 15};
            double age0 = age_at(p, s0);
            if (age0 >= p.retirement_age) break;
            for (std::size_t g = 0; g < cfg.games_per_season; ++g) {
                Date d = Date::from_days(s0.days() + 7 * static_cast<std::int64_t>(g));
                double age = age_at(p, d);
                dates.push_back(d);
                ages.push_back(age);
                r.push_back(cfg.base_rating * p.skill * aging_multiplier(p, age) +
                            rng.normal(0.0, cfg.noise_sd));
            }
            if (!late) {
                double stay = age0 < 30.0 ? 0.9 : 0.72;
                if (!rng.bernoulli(stay)) break;
            }
        }
        out.push_back(finish_series(p.player_id, std::move(dates), std::move(ages), std::move(r),
                                    windows));
        if (truth) truth->push_back(std::move(p));
    }
    return out;
}

std::vector<RatingSeries> generate_volatility_population(const VolatilityPopulationConfig& cfg,
                                                         const WindowConfig& windows) {
    if (cfg.players < 1 || cfg.games < 1) {
        throw ValidationError("volatility population config: counts must be at least 1");
    }
    Rng rng(cfg.seed);
    std::vector<RatingSeries> out;
    Date start{cfg.start_year, 8, 15};
    for (std::size_t i = 0; i < cfg.players; ++i) {
        double level = std::max(0.1 * cfg.level_mean, rng.normal(cfg.level_mean, cfg.level_sd));
        double noise = cfg.noise_per_level * level;
        double age0 = rng.uniform(18.0, 30.0);
        std::vector<Date> dates;
        std::vector<double> ages;
        std::vector<double> r;
        for (std::size_t g = 0; g < cfg.games; ++g) {
            Date d = Date::from_days(start.days() + 7 * static_cast<std::int64_t>(g));
            dates.push_back(d);
            ages.push_back(age0 + 7.0 * static_cast<double>(g) / kDaysPerYear);
            r.push_back(level + rng.normal(0.0, noise));
        }
        out.push_back(finish_series(player_name(i + 1), std::move(dates), std::move(ages),
                                    std::move(r), windows));
    }
    return out;
}

} // namespace vaep
