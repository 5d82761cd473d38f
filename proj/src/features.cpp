#include "vaep/features.hpp"

#include <algorithm>
#include <cmath>

namespace vaep {

namespace {

const std::vector<std::string> kIntentColumns = {
    "period",
    "second",
    "x",
    "endX",
    "bodyPart",
    "encType",
    "startAngleToGoal",
    "startDistanceToGoal",
    "intentProgressive",
    "encPreviousActionType1",
    "previousActionTeamIsEqual1",
    "encPreviousActionType2",
    "previousActionTeamIsEqual2",
};

const std::vector<std::string> kOutcomeColumns = {
    "period",
    "second",
    "x",
    "endX",
    "bodyPart",
    "encType",
    "startAngleToGoal",
    "startDistanceToGoal",
    "endAngleToGoal",
    "endDistanceToGoal",
    "encPreviousActionType1",
    "previousActionTeamIsEqual1",
    "encPreviousActionType2",
    "previousActionTeamIsEqual2",
    "outcome",
    "distanceToPost",
    "distanceToBar",
};

} // namespace

std::string_view short_name(FeatureVariant v) { return v == FeatureVariant::Intent ? "i" : "o"; }

std::optional<FeatureVariant> parse_variant(std::string_view name) {
    if (name == "i" || name == "intent") return FeatureVariant::Intent;
    if (name == "o" || name == "outcome") return FeatureVariant::OutcomeAware;
    return std::nullopt;
}

double distance_to_goal(double x, double y) {
    return std::hypot(kGoalCenterX - x, kGoalCenterY - y);
}

double angle_to_goal(double x, double y) {
    return std::atan2(std::abs(y - kGoalCenterY), kGoalCenterX - x);
}

ShotPlacement shot_placement_distances(double end_y, std::optional<double> end_z) {
    const double lower_post = kGoalCenterY - kHalfGoalWidth;
    const double upper_post = kGoalCenterY + kHalfGoalWidth;
    ShotPlacement p;
    p.distance_to_post = std::min(std::abs(end_y - lower_post), std::abs(end_y - upper_post));
    p.distance_to_bar = end_z ? std::abs(kBarHeight - *end_z) : kBarHeight;
    return p;
}

std::vector<double> FeatureRow::values() const {
    if (variant == FeatureVariant::Intent) {
        return {period,
                second,
                x,
                end_x,
                body_part_is_head,
                enc_type,
                start_angle_to_goal,
                start_distance_to_goal,
                intent_progressive,
                enc_prev_type_1,
                prev_team_equal_1,
                enc_prev_type_2,
                prev_team_equal_2};
    }
    return {period,
            second,
            x,
            end_x,
            body_part_is_head,
            enc_type,
            start_angle_to_goal,
            start_distance_to_goal,
            end_angle_to_goal,
            end_distance_to_goal,
            enc_prev_type_1,
            prev_team_equal_1,
            enc_prev_type_2,
            prev_team_equal_2,
            outcome,
            distance_to_post,
            distance_to_bar};
}

const std::vector<std::string>& feature_columns(FeatureVariant v) {
    return v == FeatureVariant::Intent ? kIntentColumns : kOutcomeColumns;
}

std::vector<FeatureRow> build_features(std::span<const Event> events, FeatureVariant variant) {
    std::vector<FeatureRow> rows(events.size());
    for (const auto& period : period_ranges(events)) {
        for (std::size_t i = period.begin; i < period.end; ++i) {
            const Event& e = events[i];
            FeatureRow& r = rows[i];
            r.variant = variant;
            r.period = e.period;
            r.second = e.second;
            r.x = e.x;
            r.end_x = e.end_x;
            r.body_part_is_head = e.body_part == BodyPart::Head ? 1.0 : 0.0;
            r.enc_type = action_code(e.action_type);
            r.start_angle_to_goal = angle_to_goal(e.x, e.y);
            r.start_distance_to_goal = distance_to_goal(e.x, e.y);

            const double end_distance = distance_to_goal(e.end_x, e.end_y);
            if (variant == FeatureVariant::Intent) {
                r.intent_progressive = end_distance < r.start_distance_to_goal ? 1.0 : 0.0;
            } else {
                r.end_angle_to_goal = angle_to_goal(e.end_x, e.end_y);
                r.end_distance_to_goal = end_distance;
                const bool shot = is_shot_like(e.action_type);
                r.outcome = (shot || e.outcome) ? 1.0 : 0.0;
                if (shot) {
                    const auto placement = shot_placement_distances(e.end_y, e.end_z);
                    r.distance_to_post = placement.distance_to_post;
                    r.distance_to_bar = placement.distance_to_bar;
                }
            }

            if (i >= period.begin + 1) {
                const Event& p = events[i - 1];
                r.enc_prev_type_1 = action_code(p.action_type);
                r.prev_team_equal_1 = p.team_id == e.team_id ? 1.0 : 0.0;
            }
            if (i >= period.begin + 2) {
                const Event& p = events[i - 2];
                r.enc_prev_type_2 = action_code(p.action_type);
                r.prev_team_equal_2 = p.team_id == e.team_id ? 1.0 : 0.0;
            }
        }
    }
    return rows;
}

FeatureMatrix to_matrix(std::span<const FeatureRow> rows, FeatureVariant variant) {
    FeatureMatrix m(feature_columns(variant), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        FeatureRow r = rows[i];
        r.variant = variant;
        const auto v = r.values();
        std::copy(v.begin(), v.end(), m.values.begin() + static_cast<std::ptrdiff_t>(i * m.cols()));
    }
    return m;
}

FeatureMatrix feature_matrix(std::span<const Event> events, FeatureVariant variant) {
    return to_matrix(build_features(events, variant), variant);
}

} // namespace vaep
