#include "vaep/valuation.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "vaep/csv.hpp"
#include "vaep/error.hpp"

namespace vaep {

std::vector<double> lag2_differences(std::span<const Event> events,
                                     std::span<const double> predictions) {
    if (events.size() != predictions.size()) {
        throw ValidationError("predictions are not aligned with events");
    }
    std::vector<double> values(events.size(), 0.0);
    for (const auto& period : period_ranges(events)) {
        for (std::size_t i = period.begin; i < period.end; ++i) {
            double before = 0.0;
            if (i >= period.begin + 2) {
                before = predictions[i - 2];
                if (events[i - 2].team_id != events[i].team_id) before = -before;
            }
            values[i] = predictions[i] - before;
        }
    }
    return values;
}

std::vector<ActionValue> action_values(std::span<const Event> events,
                                       std::span<const double> predictions, FeatureVariant variant) {
    const auto diffs = lag2_differences(events, predictions);
    std::vector<ActionValue> out;
    out.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].action_type == ActionType::KickOff) continue;
        out.push_back({i, variant, diffs[i]});
    }
    return out;
}

std::vector<ActionValueRow> join_action_values(std::span<const Event> events,
                                               std::span<const ActionValue> intent,
                                               std::span<const ActionValue> outcome) {
    std::map<std::size_t, ActionValueRow> rows;
    auto row_for = [&](std::size_t index) -> ActionValueRow& {
        if (index >= events.size()) {
            throw ValidationError("action value references an unknown event");
        }
        auto [it, inserted] = rows.try_emplace(index);
        if (inserted) {
            const Event& e = events[index];
            it->second = {e.game_id, index, e.player_id, e.action_type, std::nullopt, std::nullopt};
        }
        return it->second;
    };
    for (const auto& v : intent) row_for(v.event_index).i_vaep = v.value;
    for (const auto& v : outcome) row_for(v.event_index).o_vaep = v.value;

    std::vector<ActionValueRow> out;
    out.reserve(rows.size());
    for (auto& [index, row] : rows) out.push_back(std::move(row));
    return out;
}

void write_action_values_csv(std::ostream& out, std::span<const ActionValueRow> rows) {
    out << "game_id,event_index,player_id,action_type,i_vaep,o_vaep\n";
    for (const auto& r : rows) {
        out << r.game_id << ',' << r.event_index << ',' << r.player_id << ','
            << to_string(r.action_type) << ',' << csv::format_optional(r.i_vaep) << ','
            << csv::format_optional(r.o_vaep) << '\n';
    }
}

std::vector<ActionValueRow> read_action_values_csv(std::istream& in) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw SchemaError("action value file is empty");
    }
    csv::expect_header(csv::split_line(line),
                       {"game_id", "event_index", "player_id", "action_type", "i_vaep", "o_vaep"},
                       "action values");
    std::vector<ActionValueRow> rows;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = csv::split_line(line);
        if (f.size() != 6) {
            throw SchemaError("action values line " + std::to_string(line_no) + ": expected 6 fields");
        }
        auto type = parse_action_type(f[3]);
        if (!type) {
            throw SchemaError("action values line " + std::to_string(line_no) +
                              ": unknown action_type '" + f[3] + "'");
        }
        rows.push_back({f[0], static_cast<std::size_t>(csv::parse_int(f[1], "event_index", line_no)),
                        f[2], *type, csv::parse_optional_double(f[4], "i_vaep", line_no),
                        csv::parse_optional_double(f[5], "o_vaep", line_no)});
    }
    return rows;
}

} // namespace vaep
