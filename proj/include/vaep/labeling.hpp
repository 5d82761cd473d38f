#pragma once

// Regression targets for the value models.
//
// The goal-proximity label is signed from the acting team's perspective and
// decays from 1 to 0 over the minute before a goal; the last few actions
// before the goal are always labeled with magnitude 1. The next-k label is the
// classic "scores / concedes within k actions" target folded into one signed
// value so both schemes can be compared on the same error metrics.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vaep/event_model.hpp"

namespace vaep {

enum class LabelScheme {
    GoalProximity,  ///< command-line token "eq1"
    NextK,          ///< command-line token "k10"
};

std::string_view short_name(LabelScheme s);
std::optional<LabelScheme> parse_label_scheme(std::string_view name);

struct GoalProximityParams {
    double time_window_minutes = 1.0;
    /// Actions with 0 < O_goal - O_e <= action_window get magnitude 1.
    std::size_t action_window = 5;
};

/// Label of one event. `ordinal` is the event's position in its game's
/// sorted event list; `goals` may span many games. Only the first goal at or
/// after the event in the same game and period is considered.
double goal_proximity_label(const Event& e, std::size_t ordinal, std::span<const GoalRecord> goals,
                            const GoalProximityParams& params = {});

struct NextKLabel {
    int score = 0;
    int concede = 0;
    int combined() const { return score - concede; }
};

/// Goals with 0 <= O_goal - O_e <= k in the same game and period.
NextKLabel next_k_label(const Event& e, std::size_t ordinal, std::span<const GoalRecord> goals,
                        std::size_t k = 10);

struct LabeledSample {
    std::size_t event_index = 0;
    double label = 0.0;
};

struct LabelOptions {
    GoalProximityParams proximity;
    std::size_t k = 10;
};

std::vector<LabeledSample> label_dataset(std::span<const Event> events,
                                         std::span<const GoalRecord> goals, LabelScheme scheme,
                                         const LabelOptions& options = {});

std::vector<double> label_values(std::span<const LabeledSample> samples);

void write_labels_csv(std::ostream& out, std::span<const LabeledSample> samples);
std::vector<LabeledSample> read_labels_csv(std::istream& in);

} // namespace vaep
