#pragma once

// Stage runners behind the command-line front end. Each stage reads only its
// declared inputs below the output directory and writes only its own
// sub-directory:
//
//   synth/      events.csv games.csv ground_truth.json
//   ingest/     events.csv games.csv goals.csv report.json
//   train/      labels_<scheme>.csv split.csv model_<v>.json report.json
//               [benchmark.csv benchmark.txt]
//   value/      action_values.csv
//   rate/       series_<v>.csv top_peaks_<v>.csv
//   volatility/ volatility_<v>.csv
//   pdc/        curve_<v>.csv late_bloomers_<v>.csv

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vaep/analytics.hpp"
#include "vaep/features.hpp"
#include "vaep/forest.hpp"
#include "vaep/labeling.hpp"
#include "vaep/ratings.hpp"
#include "vaep/synth.hpp"

namespace vaep {

struct PipelineConfig {
    std::filesystem::path out_dir = "out";
    /// Single source of randomness; league, split and forest seeds derive from it.
    std::uint64_t seed = 1;
    std::vector<FeatureVariant> variants{FeatureVariant::Intent, FeatureVariant::OutcomeAware};
    LabelScheme labels = LabelScheme::GoalProximity;
    LabelOptions label_options;
    ForestConfig forest;
    double test_fraction = 0.3;
    bool benchmark = false;
    WindowConfig windows;
    RatingOptions rating;
    std::size_t top_k = 10;
    NegativeMask volatility_mask = NegativeMask::Zeroed;
    DevelopmentCurveOptions pdc;
    int late_bloomer_age = 30;
    LeagueConfig league;
    /// Event file read by `ingest`; defaults to the synth stage output.
    std::optional<std::filesystem::path> events_path;

    /// Re-derives the seeded sub-configs from `seed`.
    void apply_seed(std::uint64_t s);
};

/// "i", "o" or "both". Throws UsageError.
std::vector<FeatureVariant> parse_variant_selection(const std::string& s);

/// Reads a JSON config (documented key set, unknown keys rejected) on top of
/// the defaults. Throws UsageError.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Games assigned to the test set: a seeded shuffle of the sorted game ids,
/// first round(fraction * n) games, returned sorted.
std::vector<std::string> split_test_games(std::vector<std::string> game_ids, double fraction,
                                          std::uint64_t seed);

void run_synth(const PipelineConfig& cfg);
void run_ingest(const PipelineConfig& cfg);
void run_train(const PipelineConfig& cfg);
void run_value(const PipelineConfig& cfg);
void run_rate(const PipelineConfig& cfg);
void run_volatility(const PipelineConfig& cfg);
void run_pdc(const PipelineConfig& cfg);

/// Every stage in order.
void run_all(const PipelineConfig& cfg);

} // namespace vaep
