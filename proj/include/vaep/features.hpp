#pragma once

// Per-event feature vectors for the intent (I-VAEP) and outcome-aware
// (O-VAEP) value models.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vaep/event_model.hpp"
#include "vaep/matrix.hpp"

namespace vaep {

inline constexpr double kGoalCenterX = kPitchLength;
inline constexpr double kGoalCenterY = kPitchWidth / 2.0;
inline constexpr double kHalfGoalWidth = 3.66;
inline constexpr double kBarHeight = 2.44;

/// Encoded previous-action type for the first events of a period.
inline constexpr int kNoPreviousAction = -1;

enum class FeatureVariant { Intent, OutcomeAware };

/// "i" / "o", as used in file names and on the command line.
std::string_view short_name(FeatureVariant v);
std::optional<FeatureVariant> parse_variant(std::string_view name);

double distance_to_goal(double x, double y);

/// Absolute angle between the ray to the goal center and the long axis, in [0, pi/2].
double angle_to_goal(double x, double y);

struct ShotPlacement {
    double distance_to_post = 0.0;
    double distance_to_bar = 0.0;
};

/// Placement of a shot in the goal mouth. A missing height is treated as a
/// ground-level shot.
ShotPlacement shot_placement_distances(double end_y, std::optional<double> end_z);

struct FeatureRow {
    FeatureVariant variant = FeatureVariant::Intent;
    double period = 1;
    double second = 0;
    double x = 0;
    double end_x = 0;
    double body_part_is_head = 0;
    double enc_type = 0;
    double start_angle_to_goal = 0;
    double start_distance_to_goal = 0;
    double end_angle_to_goal = 0;      // outcome-aware only
    double end_distance_to_goal = 0;   // outcome-aware only
    double intent_progressive = 0;     // intent only
    double enc_prev_type_1 = kNoPreviousAction;
    double prev_team_equal_1 = 1;
    double enc_prev_type_2 = kNoPreviousAction;
    double prev_team_equal_2 = 1;
    double outcome = 0;                // outcome-aware only
    double distance_to_post = 0;       // outcome-aware only; 0 for non-shots
    double distance_to_bar = 0;        // outcome-aware only; 0 for non-shots

    /// Values in column-manifest order for this row's variant.
    std::vector<double> values() const;
};

/// Column manifest, in export order.
const std::vector<std::string>& feature_columns(FeatureVariant v);

/// One row per event. Previous-action features never cross a period boundary.
std::vector<FeatureRow> build_features(std::span<const Event> events, FeatureVariant variant);

FeatureMatrix to_matrix(std::span<const FeatureRow> rows, FeatureVariant variant);

/// Convenience: build_features followed by to_matrix.
FeatureMatrix feature_matrix(std::span<const Event> events, FeatureVariant variant);

} // namespace vaep
