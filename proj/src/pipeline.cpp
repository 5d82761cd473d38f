#include "vaep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vaep/benchmark.hpp"
#include "vaep/csv.hpp"
#include "vaep/error.hpp"
#include "vaep/stats.hpp"
#include "vaep/valuation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace vaep {

void PipelineConfig::apply_seed(std::uint64_t s) {
    seed = s;
    league.seed = s;
    forest.seed = s;
}

namespace {

// ---- config -----------------------------------------------------------------

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw UsageError("config: '" + where + "' must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok) {
            throw UsageError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

template <typename T>
void take(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError("config: bad value for '" + (where.empty() ? std::string(key) : where + "." + key) + "'");
    }
}

} // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    PipelineConfig cfg;
    check_keys(j, {"out", "seed", "variant", "labels", "events", "labeling", "forest", "split",
                   "benchmark", "ratings", "volatility", "pdc", "league"},
               "");
    std::string s;
    if (j.contains("out")) {
        take(j, "out", s, "");
        cfg.out_dir = s;
    }
    if (j.contains("seed")) {
        std::uint64_t seed = 0;
        take(j, "seed", seed, "");
        cfg.apply_seed(seed);
    }
    if (j.contains("variant")) {
        take(j, "variant", s, "");
        cfg.variants = parse_variant_selection(s);
    }
    if (j.contains("labels")) {
        take(j, "labels", s, "");
        auto scheme = parse_label_scheme(s);
        if (!scheme) throw UsageError("config: labels must be eq1 or k10");
        cfg.labels = *scheme;
    }
    if (j.contains("events")) {
        take(j, "events", s, "");
        cfg.events_path = fs::path(s);
    }
    take(j, "benchmark", cfg.benchmark, "");
    if (j.contains("labeling")) {
        const auto& o = j["labeling"];
        check_keys(o, {"time_window_minutes", "action_window", "k"}, "labeling");
        take(o, "time_window_minutes", cfg.label_options.proximity.time_window_minutes, "labeling");
        take(o, "action_window", cfg.label_options.proximity.action_window, "labeling");
        take(o, "k", cfg.label_options.k, "labeling");
    }
    if (j.contains("forest")) {
        const auto& o = j["forest"];
        check_keys(o, {"n_trees", "min_samples_split", "bootstrap", "max_features", "threads"}, "forest");
        take(o, "n_trees", cfg.forest.n_trees, "forest");
        take(o, "min_samples_split", cfg.forest.min_samples_split, "forest");
        take(o, "bootstrap", cfg.forest.bootstrap, "forest");
        take(o, "max_features", cfg.forest.max_features, "forest");
        take(o, "threads", cfg.forest.threads, "forest");
    }
    if (j.contains("split")) {
        const auto& o = j["split"];
        check_keys(o, {"test_fraction"}, "split");
        take(o, "test_fraction", cfg.test_fraction, "split");
        if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
            throw UsageError("config: split.test_fraction must lie in (0, 1)");
        }
    }
    if (j.contains("ratings")) {
        const auto& o = j["ratings"];
        check_keys(o, {"min_minutes", "short_window", "short_min", "long_window", "long_min", "top_k",
                       "category"},
                   "ratings");
        take(o, "min_minutes", cfg.rating.min_minutes, "ratings");
        take(o, "short_window", cfg.windows.short_window, "ratings");
        take(o, "short_min", cfg.windows.short_min, "ratings");
        take(o, "long_window", cfg.windows.long_window, "ratings");
        take(o, "long_min", cfg.windows.long_min, "ratings");
        take(o, "top_k", cfg.top_k, "ratings");
        if (o.contains("category") && !o["category"].is_null()) {
            take(o, "category", s, "ratings");
            auto c = parse_action_category(s);
            if (!c) throw UsageError("config: unknown ratings.category '" + s + "'");
            cfg.rating.category = *c;
        }
    }
    if (j.contains("volatility")) {
        const auto& o = j["volatility"];
        check_keys(o, {"negative_mask"}, "volatility");
        if (o.contains("negative_mask")) {
            take(o, "negative_mask", s, "volatility");
            if (s == "zeroed") {
                cfg.volatility_mask = NegativeMask::Zeroed;
            } else if (s == "dropped") {
                cfg.volatility_mask = NegativeMask::Dropped;
            } else {
                throw UsageError("config: volatility.negative_mask must be zeroed or dropped");
            }
        }
    }
    if (j.contains("pdc")) {
        const auto& o = j["pdc"];
        check_keys(o, {"smoothing_window", "rating", "correction", "min_seasons", "late_bloomer_age"}, "pdc");
        take(o, "smoothing_window", cfg.pdc.smoothing_window, "pdc");
        take(o, "min_seasons", cfg.pdc.min_seasons, "pdc");
        take(o, "late_bloomer_age", cfg.late_bloomer_age, "pdc");
        if (o.contains("rating")) {
            take(o, "rating", s, "pdc");
            if (s == "game") cfg.pdc.rating = CurveRating::Game;
            else if (s == "short_term") cfg.pdc.rating = CurveRating::ShortTerm;
            else if (s == "long_term") cfg.pdc.rating = CurveRating::LongTerm;
            else throw UsageError("config: pdc.rating must be game, short_term or long_term");
        }
        if (o.contains("correction")) {
            take(o, "correction", s, "pdc");
            if (s == "scarcity") cfg.pdc.correction = AgeBiasCorrection::ScarcityWeight;
            else if (s == "none") cfg.pdc.correction = AgeBiasCorrection::None;
            else throw UsageError("config: pdc.correction must be scarcity or none");
        }
    }
    if (j.contains("league")) {
        const auto& o = j["league"];
        check_keys(o, {"n_teams", "outfield_per_team", "goalkeepers_per_team", "seasons",
                       "games_per_season", "events_per_game_min", "events_per_game_max",
                       "shot_propensity", "start_year", "peak_age", "late_bloomers",
                       "late_bloomer_peak_age"},
                   "league");
        auto& l = cfg.league;
        take(o, "n_teams", l.n_teams, "league");
        take(o, "outfield_per_team", l.outfield_per_team, "league");
        take(o, "goalkeepers_per_team", l.goalkeepers_per_team, "league");
        take(o, "seasons", l.seasons, "league");
        take(o, "games_per_season", l.games_per_season, "league");
        take(o, "events_per_game_min", l.events_per_game_min, "league");
        take(o, "events_per_game_max", l.events_per_game_max, "league");
        take(o, "shot_propensity", l.shot_propensity, "league");
        take(o, "start_year", l.start_year, "league");
        take(o, "peak_age", l.peak_age, "league");
        take(o, "late_bloomers", l.late_bloomers, "league");
        take(o, "late_bloomer_peak_age", l.late_bloomer_peak_age, "league");
        try {
            l.validate();
        } catch (const ValidationError& e) {
            throw UsageError(std::string("config: ") + e.what());
        }
    }
    return cfg;
}

std::vector<FeatureVariant> parse_variant_selection(const std::string& s) {
    if (s == "both") return {FeatureVariant::Intent, FeatureVariant::OutcomeAware};
    if (auto v = parse_variant(s)) return {*v};
    throw UsageError("variant must be i, o or both");
}

std::vector<std::string> split_test_games(std::vector<std::string> ids, double fraction,
                                          std::uint64_t seed) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Rng rng(tree_seed(seed, 0x5e11u));
    for (std::size_t i = ids.size(); i > 1; --i) {
        std::swap(ids[i - 1], ids[rng.index(i)]);
    }
    auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ids.size())));
    ids.resize(std::min(n_test, ids.size()));
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

// ---- file plumbing ------------------------------------------------------------

fs::path stage_dir(const PipelineConfig& cfg, const char* name) {
    fs::path dir = cfg.out_dir / name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw UsageError("cannot create output directory " + dir.string());
    }
    return dir;
}

fs::path require(const fs::path& p, const char* stage) {
    if (!fs::is_regular_file(p)) {
        throw MissingArtifact(stage, p.string());
    }
    return p;
}

template <typename Fn>
void write_file(const fs::path& p, Fn&& fn) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError("cannot write " + p.string());
    }
    fn(out);
    out.flush();
    if (!out) {
        throw Error("write failed for " + p.string());
    }
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + p.string());
    }
    return in;
}

void write_json(const fs::path& p, const ordered_json& j) {
    write_file(p, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

std::string variant_file(const char* stem, FeatureVariant v, const char* ext) {
    return std::string(stem) + "_" + std::string(short_name(v)) + ext;
}

fs::path ingest_events(const PipelineConfig& cfg) {
    return require(cfg.out_dir / "ingest" / "events.csv", "ingest");
}

EventData load_ingested(const PipelineConfig& cfg) {
    fs::path p = ingest_events(cfg);
    require(cfg.out_dir / "ingest" / "games.csv", "ingest");
    return parse_events(p, EventFormat::Csv);
}

std::vector<GameSheet> load_games(const PipelineConfig& cfg) {
    auto in = open_in(require(cfg.out_dir / "ingest" / "games.csv", "ingest"));
    return read_game_sheets(in, EventFormat::Csv);
}

ordered_json report_json(const EvalReport& r) {
    return {{"mae", r.mae}, {"medae", r.medae}};
}

struct TrainedModel {
    RegressionForest forest;
    EvalReport train;
    EvalReport test;
    double baseline_test_mae = 0.0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

TrainedModel train_one(const FeatureMatrix& x, const std::vector<double>& labels,
                       const std::vector<std::size_t>& train_rows,
                       const std::vector<std::size_t>& test_rows, const ForestConfig& fc,
                       FeatureVariant v, const std::string& scheme) {
    FeatureMatrix xtr = x.select_rows(train_rows);
    FeatureMatrix xte = x.select_rows(test_rows);
    std::vector<double> ytr;
    std::vector<double> yte;
    for (auto r : train_rows) ytr.push_back(labels[r]);
    for (auto r : test_rows) yte.push_back(labels[r]);
    TrainedModel m;
    m.forest = RegressionForest::fit(xtr, ytr, fc, std::string(short_name(v)));
    m.train = evaluate(m.forest.predict(xtr), ytr, "Train", scheme);
    m.test = evaluate(m.forest.predict(xte), yte, "Test", scheme);
    double mu = stats::mean(ytr);
    std::vector<double> constant(yte.size(), mu);
    m.baseline_test_mae = evaluate(constant, yte).mae;
    m.train_rows = train_rows.size();
    m.test_rows = test_rows.size();
    return m;
}

std::string model_name(FeatureVariant v) {
    return v == FeatureVariant::Intent ? "I-VAEP" : "O-VAEP";
}

} // namespace

// ---- stages -------------------------------------------------------------------

void run_synth(const PipelineConfig& cfg) {
    fs::path dir = stage_dir(cfg, "synth");
    League league = generate_league(cfg.league);
    write_file(dir / "events.csv", [&](std::ostream& o) { write_events(o, league.events); });
    write_file(dir / "games.csv", [&](std::ostream& o) { write_game_sheets(o, league.games); });
    write_file(dir / "ground_truth.json", [&](std::ostream& o) { write_ground_truth(o, league.truth); });
}

void run_ingest(const PipelineConfig& cfg) {
    fs::path src;
    if (cfg.events_path) {
        src = *cfg.events_path;
        if (!fs::is_regular_file(src)) {
            throw UsageError("event file not found: " + src.string());
        }
    } else {
        src = require(cfg.out_dir / "synth" / "events.csv", "synth");
    }
    EventData data = parse_events(src, format_for(src));
    fs::path dir = stage_dir(cfg, "ingest");
    auto goals = extract_goals(data.events);
    write_file(dir / "events.csv", [&](std::ostream& o) { write_events(o, data.events); });
    write_file(dir / "games.csv", [&](std::ostream& o) { write_game_sheets(o, data.games); });
    write_file(dir / "goals.csv", [&](std::ostream& o) { write_goals(o, goals); });
    ordered_json r;
    r["accepted_rows"] = data.report.accepted_rows;
    r["rejected_rows"] = data.report.rejected_rows;
    r["games"] = game_ranges(data.events).size();
    r["goals"] = goals.size();
    r["warnings"] = data.report.warnings;
    write_json(dir / "report.json", r);
}

void run_train(const PipelineConfig& cfg) {
    EventData data = load_ingested(cfg);
    if (data.events.empty()) {
        throw InsufficientData("no events to train on");
    }
    fs::path dir = stage_dir(cfg, "train");
    auto goals = extract_goals(data.events);

    std::vector<std::string> ids;
    for (const auto& r : game_ranges(data.events)) ids.push_back(data.events[r.begin].game_id);
    auto test_games = split_test_games(ids, cfg.test_fraction, cfg.seed);
    std::set<std::string> test_set(test_games.begin(), test_games.end());
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < data.events.size(); ++i) {
        (test_set.count(data.events[i].game_id) ? test_rows : train_rows).push_back(i);
    }
    if (train_rows.empty() || test_rows.empty()) {
        throw InsufficientData("train/test split by game left one side empty (" +
                               std::to_string(ids.size()) + " games)");
    }
    write_file(dir / "split.csv", [&](std::ostream& o) {
        o << "game_id,dataset\n";
        for (const auto& id : ids) o << id << ',' << (test_set.count(id) ? "test" : "train") << '\n';
    });

    std::map<LabelScheme, std::vector<double>> labels;
    auto label_for = [&](LabelScheme s) -> const std::vector<double>& {
        auto it = labels.find(s);
        if (it != labels.end()) return it->second;
        auto samples = label_dataset(data.events, goals, s, cfg.label_options);
        write_file(dir / ("labels_" + std::string(short_name(s)) + ".csv"),
                   [&](std::ostream& o) { write_labels_csv(o, samples); });
        return labels.emplace(s, label_values(samples)).first->second;
    };

    const std::string scheme = std::string(short_name(cfg.labels));
    ordered_json report;
    report["labels"] = scheme;
    report["seed"] = cfg.seed;
    report["train_games"] = ids.size() - test_games.size();
    report["test_games"] = test_games.size();
    ordered_json models = ordered_json::object();
    std::vector<BenchmarkRow> bench;
    for (auto v : cfg.variants) {
        FeatureMatrix x = feature_matrix(data.events, v);
        auto m = train_one(x, label_for(cfg.labels), train_rows, test_rows, cfg.forest, v, scheme);
        write_file(dir / variant_file("model", v, ".json"), [&](std::ostream& o) { m.forest.save(o); });
        models[std::string(short_name(v))] = {
            {"train_rows", m.train_rows},
            {"test_rows", m.test_rows},
            {"train", report_json(m.train)},
            {"test", report_json(m.test)},
            {"constant_mean_test_mae", m.baseline_test_mae},
        };
        if (cfg.benchmark) {
            for (auto s : {LabelScheme::NextK, LabelScheme::GoalProximity}) {
                std::string tok(short_name(s));
                TrainedModel other;
                const TrainedModel* use = &m;
                if (s != cfg.labels) {
                    other = train_one(x, label_for(s), train_rows, test_rows, cfg.forest, v, tok);
                    use = &other;
                }
                bench.push_back({model_name(v), "Train", tok, use->train.mae, use->train.medae, {}, {}});
                bench.push_back({model_name(v), "Test", tok, use->test.mae, use->test.medae, {}, {}});
            }
        }
    }
    report["models"] = std::move(models);
    write_json(dir / "report.json", report);
    if (cfg.benchmark) {
        compute_changes(bench, "k10");
        write_file(dir / "benchmark.csv", [&](std::ostream& o) { write_benchmark_csv(o, bench); });
        write_file(dir / "benchmark.txt", [&](std::ostream& o) { o << format_benchmark_table(bench); });
    }
}

void run_value(const PipelineConfig& cfg) {
    fs::path events_path = ingest_events(cfg);
    std::vector<fs::path> model_paths;
    for (auto v : cfg.variants) {
        model_paths.push_back(require(cfg.out_dir / "train" / variant_file("model", v, ".json"), "train"));
    }
    EventData data = parse_events(events_path, EventFormat::Csv);
    std::vector<ActionValue> intent;
    std::vector<ActionValue> outcome;
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        auto v = cfg.variants[k];
        auto in = open_in(model_paths[k]);
        auto forest = RegressionForest::load(in);
        auto pred = forest.predict(feature_matrix(data.events, v));
        (v == FeatureVariant::Intent ? intent : outcome) = action_values(data.events, pred, v);
    }
    fs::path dir = stage_dir(cfg, "value");
    auto rows = join_action_values(data.events, intent, outcome);
    write_file(dir / "action_values.csv", [&](std::ostream& o) { write_action_values_csv(o, rows); });
}

void run_rate(const PipelineConfig& cfg) {
    fs::path values_path = require(cfg.out_dir / "value" / "action_values.csv", "value");
    auto games = load_games(cfg);
    auto in = open_in(values_path);
    auto rows = read_action_values_csv(in);
    fs::path dir = stage_dir(cfg, "rate");
    for (auto v : cfg.variants) {
        bool present = std::any_of(rows.begin(), rows.end(), [&](const ActionValueRow& r) {
            return v == FeatureVariant::Intent ? r.i_vaep.has_value() : r.o_vaep.has_value();
        });
        if (!present && !rows.empty()) {
            throw MissingArtifact("value", values_path.string() + " [" + std::string(short_name(v)) +
                                               "-variant values]");
        }
        auto actions = valued_actions(rows, v);
        auto ratings = game_ratings(actions, games, cfg.rating);
        auto series = build_series(ratings, cfg.windows);
        auto peaks = top_peaks(series, cfg.top_k);
        write_file(dir / variant_file("series", v, ".csv"), [&](std::ostream& o) { write_series_csv(o, series); });
        write_file(dir / variant_file("top_peaks", v, ".csv"), [&](std::ostream& o) { write_peaks_csv(o, peaks); });
    }
}

void run_volatility(const PipelineConfig& cfg) {
    std::vector<fs::path> inputs;
    for (auto v : cfg.variants) {
        inputs.push_back(require(cfg.out_dir / "rate" / variant_file("series", v, ".csv"), "rate"));
    }
    fs::path dir = stage_dir(cfg, "volatility");
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        auto in = open_in(inputs[k]);
        auto series = read_series_csv(in);
        auto reports = adjust_volatility(volatility_all(series, cfg.volatility_mask));
        write_file(dir / variant_file("volatility", cfg.variants[k], ".csv"),
                   [&](std::ostream& o) { write_volatility_csv(o, reports); });
    }
}

void run_pdc(const PipelineConfig& cfg) {
    std::vector<fs::path> inputs;
    for (auto v : cfg.variants) {
        inputs.push_back(require(cfg.out_dir / "rate" / variant_file("series", v, ".csv"), "rate"));
    }
    auto games = load_games(cfg);
    fs::path dir = stage_dir(cfg, "pdc");
    for (std::size_t k = 0; k < cfg.variants.size(); ++k) {
        auto in = open_in(inputs[k]);
        auto series = read_series_csv(in);
        attach_ages(series, games);
        auto curve = development_curve(series, cfg.pdc);
        auto late = late_bloomers(series, cfg.late_bloomer_age);
        write_file(dir / variant_file("curve", cfg.variants[k], ".csv"),
                   [&](std::ostream& o) { write_development_curve_csv(o, curve); });
        write_file(dir / variant_file("late_bloomers", cfg.variants[k], ".csv"),
                   [&](std::ostream& o) { write_late_bloomers_csv(o, late); });
    }
}

void run_all(const PipelineConfig& cfg) {
    if (!cfg.events_path) run_synth(cfg);
    run_ingest(cfg);
    run_train(cfg);
    run_value(cfg);
    run_rate(cfg);
    run_volatility(cfg);
    run_pdc(cfg);
}

} // namespace vaep
