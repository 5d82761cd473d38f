// Acceptance gate. Prints one PASS/FAIL line per criterion; tolerances and
// thresholds are pinned below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vaep/benchmark.hpp"
#include "vaep/pipeline.hpp"
#include "vaep/stats.hpp"
#include "vaep/valuation.hpp"

using namespace vaep;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

constexpr std::size_t kLabelGames = 50;
constexpr std::size_t kLabelMaxEvents = 200;
constexpr double kLabelSeconds = 10.0;

constexpr std::size_t kCareers = 100;
constexpr std::size_t kCareerMaxLength = 300;
constexpr double kRollingTol = 1e-12;

constexpr std::size_t kTelescopeTrials = 200;
constexpr double kTelescopeTol = 1e-9;

constexpr double kForestMaeRatio = 0.8;
constexpr double kForestSeconds = 60.0;

constexpr double kOlsTol = 1e-9;
constexpr double kMaxAbsPearson = 0.05;

constexpr int kPeakLo = 25;
constexpr int kPeakHi = 27;
constexpr int kLateBloomerAge = 30;

constexpr double kMinSpearman = 0.8;
constexpr double kPipelineSeconds = 300.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

std::vector<std::string> game_ids(std::span<const Event> events) {
    std::vector<std::string> ids;
    for (const auto& r : game_ranges(events)) ids.push_back(events[r.begin].game_id);
    return ids;
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), root).string()] = s.str();
    }
    return out;
}

PipelineConfig default_pipeline(const fs::path& out) {
    PipelineConfig cfg;
    cfg.apply_seed(kSeed);
    cfg.out_dir = out;
    return cfg;
}

// 1. Goal-proximity labels against the all-pairs oracle.
Outcome label_oracle(const fs::path&) {
    LeagueConfig lc;
    lc.seed = kSeed;
    lc.events_per_game_min = 120;
    lc.events_per_game_max = 190;
    auto league = generate_league(lc);
    std::vector<Event> events;
    std::size_t games = 0;
    for (const auto& r : game_ranges(league.events)) {
        if (r.size() > kLabelMaxEvents) continue;
        events.insert(events.end(), league.events.begin() + static_cast<long>(r.begin),
                      league.events.begin() + static_cast<long>(r.end));
        if (++games == kLabelGames) break;
    }
    if (games < kLabelGames) return {false, "only " + std::to_string(games) + " games within the size cap"};

    auto t0 = std::chrono::steady_clock::now();
    auto goals = extract_goals(events);
    auto got = label_values(label_dataset(events, goals, LabelScheme::GoalProximity));
    double secs = seconds_since(t0);

    auto want = oracle::eq1_labels(events);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < got.size(); ++i) mismatches += got[i] != want[i];
    std::size_t nonzero = 0;
    for (double v : want) nonzero += v != 0.0;
    bool ok = mismatches == 0 && got.size() == want.size() && secs < kLabelSeconds;
    return {ok, std::to_string(games) + " games, " + std::to_string(events.size()) + " events, " +
                    std::to_string(goals.size()) + " goals, " + std::to_string(nonzero) +
                    " non-zero labels, mismatches " + std::to_string(mismatches) + ", " + fmt(secs, 3) +
                    " s"};
}

// 2. Rolling means against recomputation.
Outcome rolling_oracle(const fs::path&) {
    Rng rng(kSeed);
    double worst = 0.0;
    bool defined_ok = true;
    for (std::size_t c = 0; c < kCareers; ++c) {
        std::size_t n = 1 + rng.index(kCareerMaxLength);
        std::vector<double> r;
        for (std::size_t i = 0; i < n; ++i) r.push_back(rng.normal(0.005, 0.01));
        for (auto [w, m] : {std::pair<std::size_t, std::size_t>{10, 5}, {40, 20}}) {
            auto got = rolling_mean(r, w, m);
            auto want = oracle::rolling(r, w, m);
            for (std::size_t i = 0; i < n; ++i) {
                if (got[i].has_value() != want[i].has_value()) defined_ok = false;
                else if (got[i]) worst = std::max(worst, std::abs(*got[i] - *want[i]));
            }
        }
    }
    return {defined_ok && worst <= kRollingTol,
            std::to_string(kCareers) + " careers, max abs error " + fmt(worst, 3) +
                (defined_ok ? "" : ", definedness mismatch")};
}

// 3. Lag-2 values telescope within a one-team period.
Outcome telescoping(const fs::path&) {
    Rng rng(kSeed);
    double worst = 0.0;
    for (std::size_t t = 0; t < kTelescopeTrials; ++t) {
        std::size_t n = 2 + rng.index(400);
        std::vector<Event> events;
        std::vector<double> p;
        for (std::size_t i = 0; i < n; ++i) {
            events.push_back(fixture::ev("g", 1, static_cast<double>(i), "A", "a"));
            p.push_back(rng.uniform(-1.0, 1.0));
        }
        auto v = lag2_differences(events, p);
        double sum = 0.0;
        for (double x : v) sum += x;
        worst = std::max(worst, std::abs(sum - (p[n - 1] + p[n - 2])));
    }
    return {worst <= kTelescopeTol, std::to_string(kTelescopeTrials) + " periods, max abs error " + fmt(worst, 3)};
}

// 4. Forest: step fixture, determinism, accuracy against the constant-mean
// predictor on the default league, training time.
Outcome forest(const fs::path&) {
    std::vector<std::string> notes;
    bool ok = true;

    FeatureMatrix step(std::vector<std::string>{"x"}, 10);
    std::vector<std::vector<double>> sx;
    std::vector<double> sy;
    for (int i = 0; i < 10; ++i) {
        step.at(static_cast<std::size_t>(i), 0) = i;
        sx.push_back({static_cast<double>(i)});
        sy.push_back(i < 5 ? -0.5 : 0.75);
    }
    auto one = RegressionForest::fit(step, sy, ForestConfig{1, 2, false, 0, kSeed, 1});
    auto split = oracle::best_split(sx, sy);
    const auto& root = one.trees()[0].nodes()[0];
    bool step_ok = root.feature == split.feature && root.threshold == split.threshold && one.predict(step) == sy;
    ok &= step_ok;
    notes.push_back(std::string("step oracle ") + (step_ok ? "ok" : "MISMATCH"));

    LeagueConfig lc;
    lc.seed = kSeed;
    auto league = generate_league(lc);
    auto goals = extract_goals(league.events);
    auto y = label_values(label_dataset(league.events, goals, LabelScheme::GoalProximity));
    auto test_games = split_test_games(game_ids(league.events), 0.3, kSeed);
    std::set<std::string> test_set(test_games.begin(), test_games.end());
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < league.events.size(); ++i) {
        (test_set.count(league.events[i].game_id) ? te : tr).push_back(i);
    }
    auto x = feature_matrix(league.events, FeatureVariant::OutcomeAware);
    auto xtr = x.select_rows(tr);
    auto xte = x.select_rows(te);
    std::vector<double> ytr, yte;
    for (auto i : tr) ytr.push_back(y[i]);
    for (auto i : te) yte.push_back(y[i]);

    ForestConfig fc;
    fc.seed = kSeed;
    auto t0 = std::chrono::steady_clock::now();
    auto f = RegressionForest::fit(xtr, ytr, fc, "o");
    double fit_secs = seconds_since(t0);
    auto pred = f.predict(xte);
    auto again = RegressionForest::fit(xtr, ytr, fc, "o").predict(xte);
    bool det = pred == again;
    ok &= det;
    notes.push_back(std::string("refit ") + (det ? "bit-identical" : "DIFFERS"));

    double mae = evaluate(pred, yte).mae;
    std::vector<double> constant(yte.size(), stats::mean(ytr));
    double base = evaluate(constant, yte).mae;
    ok &= mae <= kForestMaeRatio * base;
    ok &= fit_secs < kForestSeconds;
    notes.push_back(std::to_string(league.events.size()) + " events, test MAE " + fmt(mae) + " vs constant " +
                    fmt(base) + " (ratio " + fmt(mae / base, 3) + ", limit " + fmt(kForestMaeRatio) + ")");
    notes.push_back("fit " + fmt(fit_secs, 3) + " s");

    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
    return {ok, detail};
}

// 5. Dual-label benchmark table.
Outcome benchmark(const fs::path& work) {
    auto cfg = default_pipeline(work / "c5");
    cfg.benchmark = true;
    run_synth(cfg);
    run_ingest(cfg);
    run_train(cfg);
    std::ifstream in(cfg.out_dir / "train" / "benchmark.csv");
    std::string header;
    std::getline(in, header);
    std::set<std::string> combos;
    std::size_t rows = 0;
    bool changes_ok = true;
    for (std::string line; std::getline(in, line);) {
        ++rows;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
        while (f.size() < 7) f.emplace_back();
        combos.insert(f[0] + "/" + f[1] + "/" + f[2]);
        bool baseline = f[2] == "k10";
        if (baseline != (f[4].empty() && f[6].empty())) changes_ok = false;
    }
    std::ifstream txt(cfg.out_dir / "train" / "benchmark.txt");
    std::ostringstream table;
    table << txt.rdbuf();
    bool ok = header == "model,dataset,label,mae,mae_change_pct,medae,medae_change_pct" && rows == 8 &&
              combos.size() == 8 && changes_ok && !table.str().empty();
    std::cout << table.str();
    return {ok, std::to_string(rows) + " rows, " + std::to_string(combos.size()) +
                    " distinct model/dataset/label combinations"};
}

// 6. OLS residual properties and the decorrelated volatility metrics.
Outcome volatility_adjustment(const fs::path&) {
    auto pop = generate_volatility_population(VolatilityPopulationConfig{});
    auto adj = adjust_volatility(volatility_all(pop));
    std::vector<double> m;
    std::array<std::vector<double>, 3> res;
    for (const auto& r : adj) {
        m.push_back(r.median_rating);
        res[0].push_back(r.adj_game_to_game);
        res[1].push_back(r.adj_negative_game);
        res[2].push_back(r.adj_negative_short_term);
    }
    double worst_sum = 0.0, worst_dot = 0.0, worst_r = 0.0, raw_r = 0.0;
    for (const auto& v : res) {
        double s = 0.0, d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += v[i];
            d += v[i] * m[i];
        }
        worst_sum = std::max(worst_sum, std::abs(s));
        worst_dot = std::max(worst_dot, std::abs(d));
        worst_r = std::max(worst_r, std::abs(stats::pearson(v, m)));
    }
    std::vector<double> raw;
    for (const auto& r : adj) raw.push_back(r.game_to_game);
    raw_r = stats::pearson(raw, m);
    bool ok = worst_sum <= kOlsTol && worst_dot <= kOlsTol && worst_r < kMaxAbsPearson;
    return {ok, std::to_string(adj.size()) + " players, |sum res| " + fmt(worst_sum, 3) + ", |res . median| " +
                    fmt(worst_dot, 3) + ", raw r " + fmt(raw_r, 3) + ", max |adjusted r| " + fmt(worst_r, 3)};
}

// 7. Development curve peak and the planted late bloomer.
Outcome development(const fs::path&) {
    std::vector<SyntheticPlayer> truth;
    auto series = generate_development_cohort(CohortConfig{}, &truth);
    PipelineConfig cfg;
    auto curve = development_curve(series, cfg.pdc);
    int peak = curve.peak_age();
    auto raw_opts = cfg.pdc;
    raw_opts.correction = AgeBiasCorrection::None;
    int raw_peak = development_curve(series, raw_opts).peak_age();

    auto lb = late_bloomers(series, kLateBloomerAge);
    std::set<std::string> found;
    for (const auto& p : lb) found.insert(p.player_id);
    std::size_t planted = 0, detected = 0;
    for (const auto& p : truth) {
        if (!p.late_bloomer) continue;
        ++planted;
        detected += found.count(p.player_id);
    }
    bool peak_ok = peak >= kPeakLo && peak <= kPeakHi;
    bool lb_ok = planted > 0 && detected == planted;
    return {peak_ok && lb_ok, "argmax age " + std::to_string(peak) + " (want " + std::to_string(kPeakLo) + "-" +
                                  std::to_string(kPeakHi) + "; without the scarcity weight " +
                                  std::to_string(raw_peak) + "), late bloomers planted " +
                                  std::to_string(planted) + " detected " + std::to_string(detected) + " of " +
                                  std::to_string(lb.size()) + " flagged"};
}

// Spearman between planted skill and peak long-term rating from a finished run.
double skill_spearman(const fs::path& out, FeatureVariant v, std::size_t* players) {
    std::ifstream gt(out / "synth" / "ground_truth.json");
    auto j = nlohmann::json::parse(gt);
    std::map<std::string, double> skill;
    for (const auto& p : j.at("players")) skill[p.at("player_id").get<std::string>()] = p.at("skill").get<double>();
    std::ifstream in(out / "rate" / ("series_" + std::string(short_name(v)) + ".csv"));
    auto series = read_series_csv(in);
    std::vector<double> a, b;
    for (const auto& s : series) {
        std::optional<double> best;
        for (const auto& r : s.r_lt) {
            if (r && (!best || *r > *best)) best = r;
        }
        if (!best) continue;
        a.push_back(skill.at(s.player_id));
        b.push_back(*best);
    }
    *players = a.size();
    return stats::spearman(a, b);
}

// 8. Skill order recovered end to end.
Outcome skill_order(const fs::path& work) {
    auto cfg = default_pipeline(work / "c8");
    auto t0 = std::chrono::steady_clock::now();
    run_all(cfg);
    double secs = seconds_since(t0);
    bool ok = secs < kPipelineSeconds;
    std::string detail;
    for (auto v : cfg.variants) {
        std::size_t n = 0;
        double rho = skill_spearman(cfg.out_dir, v, &n);
        ok &= rho >= kMinSpearman;
        detail += std::string(short_name(v)) + ": spearman " + fmt(rho, 3) + " over " + std::to_string(n) +
                  " players; ";
    }
    return {ok, detail + "pipeline " + fmt(secs, 3) + " s"};
}

// 9. Byte-identical reruns.
Outcome determinism(const fs::path& work) {
    auto a = default_pipeline(work / "c9a");
    auto b = default_pipeline(work / "c9b");
    run_all(a);
    auto first = tree_contents(a.out_dir);
    run_all(b);
    run_all(a);
    auto second = tree_contents(b.out_dir);
    auto rerun = tree_contents(a.out_dir);
    std::size_t differing = 0;
    for (const auto& [name, bytes] : first) {
        differing += !second.count(name) || second.at(name) != bytes || !rerun.count(name) || rerun.at(name) != bytes;
    }
    bool ok = differing == 0 && first.size() == second.size() && first.size() == rerun.size() && !first.empty();
    return {ok, std::to_string(first.size()) + " files compared across a fresh run and an in-place rerun, " +
                    std::to_string(differing) + " differ"};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> which;
    std::string work = (fs::temp_directory_path() / "vaep_acceptance").string();
    std::string report;
    app.add_option("--criterion,-c", which, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
    app.add_option("--work", work, "Scratch directory for pipeline runs");
    app.add_option("--report", report, "Append results as JSON lines");
    CLI11_PARSE(app, argc, argv);
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    const std::map<int, std::function<Outcome(const fs::path&)>> checks{
        {1, label_oracle}, {2, rolling_oracle}, {3, telescoping},          {4, forest},      {5, benchmark},
        {6, volatility_adjustment}, {7, development}, {8, skill_order}, {9, determinism}};

    bool all = true;
    std::ofstream rep;
    if (!report.empty()) rep.open(report, std::ios::app);
    for (int c : which) {
        fs::path dir = fs::path(work) / ("criterion" + std::to_string(c));
        fs::remove_all(dir);
        fs::create_directories(dir);
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            o = checks.at(c)(dir);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = seconds_since(t0);
        fs::remove_all(dir);
        all &= o.pass;
        std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
        if (rep) {
            rep << nlohmann::json{{"criterion", c}, {"pass", o.pass}, {"detail", o.detail}, {"seconds", secs}}.dump()
                << '\n';
        }
    }
    return all ? 0 : 1;
}
