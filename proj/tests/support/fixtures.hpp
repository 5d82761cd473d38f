#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vaep/event_model.hpp"
#include "vaep/synth.hpp"

namespace fixture {

inline vaep::Event ev(std::string game, int period, double second, std::string team, std::string player,
                      vaep::ActionType type = vaep::ActionType::Pass, bool outcome = true,
                      double x = 50.0, double y = 34.0, double ex = 60.0, double ey = 34.0) {
    vaep::Event e;
    e.game_id = std::move(game);
    e.period = period;
    e.second = second;
    e.team_id = std::move(team);
    e.player_id = std::move(player);
    e.action_type = type;
    e.outcome = outcome;
    e.x = x;
    e.y = y;
    e.end_x = ex;
    e.end_y = ey;
    return e;
}

inline vaep::Event shot(std::string game, int period, double second, std::string team, std::string player,
                        bool goal) {
    auto e = ev(std::move(game), period, second, std::move(team), std::move(player), vaep::ActionType::Shot,
                goal, 95.0, 34.0, 105.0, 34.0);
    e.end_z = 1.0;
    return e;
}

/// Sorted random games with dense goals, own goals, repeated timestamps and
/// arbitrary action types; meant to stress labeling and valuation edge cases.
inline std::vector<vaep::Event> random_stream(std::uint64_t seed, std::size_t games,
                                              std::size_t max_events) {
    vaep::Rng rng(seed);
    std::vector<vaep::Event> out;
    for (std::size_t g = 0; g < games; ++g) {
        std::string gid = "r" + std::to_string(1000 + g);
        std::size_t n = 1 + rng.index(max_events);
        std::size_t n_first = rng.index(n + 1);
        double t = 0.0;
        int period = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == n_first && period == 1) {
                period = 2;
                t = 0.0;
            }
            if (!rng.bernoulli(0.15)) t += std::floor(rng.uniform(0.0, 40.0) * 10.0) / 10.0;
            std::string team = rng.bernoulli(0.5) ? "A" : "B";
            auto type = vaep::action_from_code(static_cast<int>(rng.index(vaep::kActionTypeCount)));
            auto e = ev(gid, period, t, team, team + std::to_string(rng.index(4)), type, rng.bernoulli(0.6),
                        rng.uniform(0.0, 105.0), rng.uniform(0.0, 68.0), rng.uniform(0.0, 105.0),
                        rng.uniform(0.0, 68.0));
            if (vaep::is_shot_like(type)) {
                e.outcome = rng.bernoulli(0.4);
                e.end_x = 105.0;
                if (rng.bernoulli(0.7)) e.end_z = rng.uniform(0.0, 3.0);
            } else if (type == vaep::ActionType::Clearance && rng.bernoulli(0.3)) {
                e.own_goal = true;
            }
            out.push_back(std::move(e));
        }
    }
    return out;
}

} // namespace fixture
