#include "vaep/labeling.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "vaep/csv.hpp"
#include "vaep/error.hpp"

namespace vaep {

std::string_view short_name(LabelScheme s) {
    return s == LabelScheme::GoalProximity ? "eq1" : "k10";
}

std::optional<LabelScheme> parse_label_scheme(std::string_view name) {
    if (name == "eq1") return LabelScheme::GoalProximity;
    if (name == "k10") return LabelScheme::NextK;
    return std::nullopt;
}

namespace {

bool same_half(const Event& e, const GoalRecord& g) {
    return g.game_id == e.game_id && g.period == e.period;
}

double proximity_from_goal(const Event& e, std::size_t ordinal, const GoalRecord& goal,
                           const GoalProximityParams& params) {
    const double minutes_before = (goal.second - e.second) / 60.0;
    const double time_component =
        std::clamp(1.0 - minutes_before / params.time_window_minutes, 0.0, 1.0);
    const double ordinal_component =
        (ordinal < goal.ordinal && goal.ordinal - ordinal <= params.action_window) ? 1.0 : 0.0;
    const double magnitude = std::max(time_component, ordinal_component);
    const double sign = e.team_id == goal.team_id ? 1.0 : -1.0;
    return sign * magnitude;
}

NextKLabel next_k_from_goals(const Event& e, std::size_t ordinal,
                             std::span<const GoalRecord> game_goals, std::size_t k) {
    NextKLabel label;
    for (const auto& g : game_goals) {
        if (g.period != e.period || g.ordinal < ordinal || g.ordinal - ordinal > k) {
            continue;
        }
        if (g.team_id == e.team_id) {
            label.score = 1;
        } else {
            label.concede = 1;
        }
    }
    return label;
}

} // namespace

double goal_proximity_label(const Event& e, std::size_t ordinal, std::span<const GoalRecord> goals,
                            const GoalProximityParams& params) {
    const GoalRecord* next = nullptr;
    for (const auto& g : goals) {
        if (!same_half(e, g) || g.ordinal < ordinal) continue;
        if (!next || g.ordinal < next->ordinal) next = &g;
    }
    return next ? proximity_from_goal(e, ordinal, *next, params) : 0.0;
}

NextKLabel next_k_label(const Event& e, std::size_t ordinal, std::span<const GoalRecord> goals,
                        std::size_t k) {
    std::vector<GoalRecord> game_goals;
    for (const auto& g : goals) {
        if (g.game_id == e.game_id) game_goals.push_back(g);
    }
    return next_k_from_goals(e, ordinal, game_goals, k);
}

std::vector<LabeledSample> label_dataset(std::span<const Event> events,
                                         std::span<const GoalRecord> goals, LabelScheme scheme,
                                         const LabelOptions& options) {
    std::unordered_map<std::string_view, std::vector<GoalRecord>> by_game;
    for (const auto& g : goals) {
        by_game[g.game_id].push_back(g);
    }
    for (auto& [id, list] : by_game) {
        std::sort(list.begin(), list.end(),
                  [](const GoalRecord& a, const GoalRecord& b) { return a.ordinal < b.ordinal; });
    }

    std::vector<LabeledSample> samples(events.size());
    for (const auto& game : game_ranges(events)) {
        auto it = by_game.find(events[game.begin].game_id);
        std::span<const GoalRecord> game_goals;
        if (it != by_game.end()) game_goals = it->second;

        // Goals are sorted by ordinal, so the first goal at or after each
        // event is found with a single forward cursor.
        std::size_t cursor = 0;
        for (std::size_t i = game.begin; i < game.end; ++i) {
            const Event& e = events[i];
            const std::size_t ordinal = i - game.begin;
            samples[i].event_index = i;
            while (cursor < game_goals.size() && game_goals[cursor].ordinal < ordinal) {
                ++cursor;
            }
            if (scheme == LabelScheme::GoalProximity) {
                if (cursor < game_goals.size() && game_goals[cursor].period == e.period) {
                    samples[i].label =
                        proximity_from_goal(e, ordinal, game_goals[cursor], options.proximity);
                }
            } else {
                samples[i].label =
                    next_k_from_goals(e, ordinal, game_goals.subspan(cursor), options.k).combined();
            }
        }
    }
    return samples;
}

std::vector<double> label_values(std::span<const LabeledSample> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.label);
    return out;
}

void write_labels_csv(std::ostream& out, std::span<const LabeledSample> samples) {
    out << "event_index,label\n";
    for (const auto& s : samples) {
        out << s.event_index << ',' << csv::format_double(s.label) << '\n';
    }
}

std::vector<LabeledSample> read_labels_csv(std::istream& in) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw SchemaError("label file is empty");
    }
    csv::expect_header(csv::split_line(line), {"event_index", "label"}, "labels");
    std::vector<LabeledSample> samples;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = csv::split_line(line);
        if (f.size() != 2) {
            throw SchemaError("labels line " + std::to_string(line_no) + ": expected 2 fields");
        }
        samples.push_back({static_cast<std::size_t>(csv::parse_int(f[0], "event_index", line_no)),
                           csv::parse_double(f[1], "label", line_no)});
    }
    return samples;
}

} // namespace vaep
