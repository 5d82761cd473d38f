#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vaep/event_model.hpp"
#include "vaep/features.hpp"

namespace vaep {

struct ActionValue {
    std::size_t event_index = 0;
    FeatureVariant variant = FeatureVariant::Intent;
    /// Value created by the action, from the acting team's perspective.
    double value = 0.0;
};

/// Lag-2 differences within each (game, period), aligned with `events` and
/// before kick-off removal. The prediction two events back is negated when
/// that event belongs to the other team; the first two events of a period
/// difference against 0.
std::vector<double> lag2_differences(std::span<const Event> events,
                                     std::span<const double> predictions);

/// Per-action values with kick-offs dropped. Throws ValidationError when
/// predictions and events are misaligned.
std::vector<ActionValue> action_values(std::span<const Event> events,
                                       std::span<const double> predictions, FeatureVariant variant);

struct ActionValueRow {
    std::string game_id;
    std::size_t event_index = 0;
    std::string player_id;
    ActionType action_type = ActionType::Pass;
    std::optional<double> i_vaep;
    std::optional<double> o_vaep;
};

/// Joins the per-variant value lists (either may be empty) into export rows
/// ordered by event index.
std::vector<ActionValueRow> join_action_values(std::span<const Event> events,
                                               std::span<const ActionValue> intent,
                                               std::span<const ActionValue> outcome);

void write_action_values_csv(std::ostream& out, std::span<const ActionValueRow> rows);
std::vector<ActionValueRow> read_action_values_csv(std::istream& in);

} // namespace vaep
