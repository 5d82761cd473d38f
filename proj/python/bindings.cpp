#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

#include "vaep/error.hpp"
#include "vaep/pipeline.hpp"
#include "vaep/stats.hpp"
#include "vaep/valuation.hpp"

namespace py = pybind11;
using namespace vaep;

namespace {

FeatureVariant variant_arg(const std::string& s) {
    auto v = parse_variant(s);
    if (!v) throw py::value_error("variant must be 'i' or 'o'");
    return *v;
}

LabelScheme scheme_arg(const std::string& s) {
    auto v = parse_label_scheme(s);
    if (!v) throw py::value_error("labels must be 'eq1' or 'k10'");
    return *v;
}

py::array_t<double> to_array(const FeatureMatrix& m) {
    py::array_t<double> out({m.rows, m.cols()});
    std::copy(m.values.begin(), m.values.end(), out.mutable_data());
    return out;
}

FeatureMatrix from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                         std::vector<std::string> columns) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
    auto rows = static_cast<std::size_t>(a.shape(0));
    auto cols = static_cast<std::size_t>(a.shape(1));
    if (columns.empty()) {
        for (std::size_t c = 0; c < cols; ++c) columns.push_back("f" + std::to_string(c));
    }
    if (columns.size() != cols) throw py::value_error("column names do not match the array width");
    FeatureMatrix m(std::move(columns), rows);
    std::copy(a.data(), a.data() + rows * cols, m.values.begin());
    return m;
}

std::vector<Event> load_events(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    return read_events(in, format_for(path)).events;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Action valuation, player ratings and development curves";

    py::register_exception<Error>(m, "VaepError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<MissingArtifact>(m, "MissingArtifact", PyExc_FileNotFoundError);

    py::class_<Event>(m, "Event")
        .def_readonly("game_id", &Event::game_id)
        .def_readonly("period", &Event::period)
        .def_readonly("second", &Event::second)
        .def_readonly("team_id", &Event::team_id)
        .def_readonly("player_id", &Event::player_id)
        .def_property_readonly("action_type", [](const Event& e) { return std::string(to_string(e.action_type)); })
        .def_readonly("x", &Event::x)
        .def_readonly("y", &Event::y)
        .def_readonly("end_x", &Event::end_x)
        .def_readonly("end_y", &Event::end_y)
        .def_readonly("end_z", &Event::end_z)
        .def_readonly("outcome", &Event::outcome)
        .def_readonly("own_goal", &Event::own_goal);

    m.def("read_events", &load_events, py::arg("path"), "Events from a CSV or JSONL file, sorted.");

    m.def(
        "generate_events",
        [](std::uint64_t seed, std::size_t seasons, std::size_t games_per_season) {
            LeagueConfig c;
            c.seed = seed;
            c.seasons = seasons;
            c.games_per_season = games_per_season;
            return generate_league(c).events;
        },
        py::arg("seed") = 1, py::arg("seasons") = 5, py::arg("games_per_season") = 14);

    m.def(
        "labels",
        [](const std::vector<Event>& events, const std::string& scheme) {
            auto goals = extract_goals(events);
            return label_values(label_dataset(events, goals, scheme_arg(scheme)));
        },
        py::arg("events"), py::arg("scheme") = "eq1");

    m.def(
        "features",
        [](const std::vector<Event>& events, const std::string& variant) {
            auto x = feature_matrix(events, variant_arg(variant));
            return py::make_tuple(x.columns, to_array(x));
        },
        py::arg("events"), py::arg("variant") = "o", "Returns (column names, matrix).");

    m.def("lag2_differences", [](const std::vector<Event>& events, const std::vector<double>& p) {
        return lag2_differences(events, p);
    });

    m.def("rolling_mean", [](const std::vector<double>& v, std::size_t window, std::size_t min_periods) {
        return rolling_mean(v, window, min_periods);
    });

    m.def("fit_ols", [](const std::vector<double>& x, const std::vector<double>& y) {
        auto f = stats::fit_ols(x, y);
        return py::make_tuple(f.intercept, f.slope);
    });

    py::class_<RegressionForest>(m, "RegressionForest")
        .def_static(
            "fit",
            [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::vector<double>& y,
               std::size_t n_trees, std::size_t min_samples_split, bool bootstrap, std::size_t max_features,
               std::uint64_t seed, std::vector<std::string> columns) {
                ForestConfig c{n_trees, min_samples_split, bootstrap, max_features, seed, 0};
                py::gil_scoped_release release;
                return RegressionForest::fit(from_array(x, std::move(columns)), y, c);
            },
            py::arg("x"), py::arg("y"), py::arg("n_trees") = 100, py::arg("min_samples_split") = 50,
            py::arg("bootstrap") = true, py::arg("max_features") = 0, py::arg("seed") = 0,
            py::arg("columns") = std::vector<std::string>{})
        .def("predict",
             [](const RegressionForest& f, const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
                 return f.predict(from_array(x, f.columns()));
             })
        .def_property_readonly("n_trees", [](const RegressionForest& f) { return f.trees().size(); })
        .def_property_readonly("columns", &RegressionForest::columns);

    m.def(
        "run_pipeline",
        [](const std::filesystem::path& out, std::uint64_t seed, const std::string& variant,
           const std::optional<std::filesystem::path>& config) {
            PipelineConfig cfg = config ? load_pipeline_config(*config) : PipelineConfig{};
            cfg.apply_seed(seed);
            cfg.out_dir = out;
            cfg.variants = parse_variant_selection(variant);
            py::gil_scoped_release release;
            run_all(cfg);
        },
        py::arg("out"), py::arg("seed") = 1, py::arg("variant") = "both", py::arg("config") = std::nullopt,
        "Runs every stage into `out`.");
}
