// vaep: command-line front end over the pipeline stages.
//
// Exit codes: 0 success, 1 internal error, 2 bad invocation or paths,
// 3 missing upstream artifact, 4 input data outside the operation's domain.

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "vaep/error.hpp"
#include "vaep/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kMissing = 3, kData = 4 };

int run_guarded(const std::function<void()>& fn) {
    try {
        fn();
        return kOk;
    } catch (const vaep::MissingArtifact& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMissing;
    } catch (const vaep::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const vaep::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kData;
    } catch (const vaep::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Action valuation, player ratings and development curves"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string variant;
    std::string labels;
    app.add_option("--config", config_path, "JSON pipeline config")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Seed for every random choice of the run");
    app.add_option("--out", out_dir, "Output directory (default: out)");
    app.add_option("--variant", variant, "Feature variant")->check(CLI::IsMember({"i", "o", "both"}));
    app.add_option("--labels", labels, "Label scheme")->check(CLI::IsMember({"eq1", "k10"}));

    std::map<std::string, std::function<void(const vaep::PipelineConfig&)>> stages{
        {"synth", vaep::run_synth},   {"ingest", vaep::run_ingest},         {"train", vaep::run_train},
        {"value", vaep::run_value},   {"rate", vaep::run_rate},             {"volatility", vaep::run_volatility},
        {"pdc", vaep::run_pdc},
    };
    std::map<std::string, CLI::App*> subs;
    subs["synth"] = app.add_subcommand("synth", "Generate a synthetic league");
    subs["ingest"] = app.add_subcommand("ingest", "Validate and normalise an event stream");
    subs["train"] = app.add_subcommand("train", "Label, split by game and fit the forests");
    subs["value"] = app.add_subcommand("value", "Per-action values from the trained forests");
    subs["rate"] = app.add_subcommand("rate", "Per-game ratings and rolling series");
    subs["volatility"] = app.add_subcommand("volatility", "Raw and rating-adjusted volatility");
    subs["pdc"] = app.add_subcommand("pdc", "Player development curve and late bloomers");
    for (auto& [_, s] : subs) s->fallthrough();

    std::string events_path;
    subs["ingest"]->add_option("--events", events_path, "Event file (.csv or .jsonl) with a sibling games file");
    bool benchmark = false;
    subs["train"]->add_flag("--benchmark", benchmark, "Also fit both label schemes and write the comparison table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    vaep::PipelineConfig cfg;
    int status = run_guarded([&] {
        if (!config_path.empty()) cfg = vaep::load_pipeline_config(config_path);
        if (seed) cfg.apply_seed(*seed);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!variant.empty()) cfg.variants = vaep::parse_variant_selection(variant);
        if (!labels.empty()) cfg.labels = *vaep::parse_label_scheme(labels);
        if (!events_path.empty()) cfg.events_path = events_path;
        if (benchmark) cfg.benchmark = true;
    });
    if (status != kOk) return status;

    for (auto& [name, s] : subs) {
        if (s->parsed()) {
            return run_guarded([&] { stages.at(name)(cfg); });
        }
    }
    return kUsage;
}
