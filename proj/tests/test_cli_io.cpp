#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "capdyn/config_keys.hpp"
#include "capdyn/experiments.hpp"
#include "capdyn/io.hpp"
#include "capdyn/run_config.hpp"

using namespace capdyn;
using namespace capdyn::io;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("capdyn_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("empty configuration resolves to the full baseline defaults") {
    const RunConfig config = parse_config(std::nullopt, {});
    CHECK(config.seed == 42);
    CHECK(config.abm.params.alpha == 0.05);
    CHECK(config.abm.params.beta == 0.03);
    CHECK(config.abm.params.gamma == 0.5);
    CHECK(config.abm.params.delta == 0.5);
    CHECK(config.abm.params.epsilon == 0.01);
    CHECK(config.abm.params.scope == 0.7);
    CHECK(config.abm.n_agents == 100);
    CHECK(config.abm.t_steps == 200);
    CHECK(config.format == OutputFormat::csv);
}

TEST_CASE("flags take precedence over the config file") {
    const auto dir = temp_dir("precedence");
    const auto file = write_file(dir, "run.conf",
                                 "seed = 7\nparams.beta = 0.02\n# comment\n");
    const RunConfig config = parse_config(file, {{"seed", "9"}});
    CHECK(config.seed == 9);
    CHECK(config.abm.params.beta == 0.02);
}

TEST_CASE("out-of-range and unknown keys are rejected with the key name") {
    CHECK_THROWS_WITH_AS(parse_config(std::nullopt, {{"params.k_ai", "1.5"}}),
                         doctest::Contains("params.k_ai"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(std::nullopt, {{"params.k_ai", "1.5"}}),
                         doctest::Contains("[0, 1.2]"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(std::nullopt, {{"params.gamm", "0.5"}}),
                         doctest::Contains("unknown config key"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config(std::nullopt, {{"n_agents", "zero"}}),
                    std::invalid_argument);
}

TEST_CASE("config round-trips through serialization") {
    const auto dir = temp_dir("roundtrip");
    const RunConfig original = parse_config(
        std::nullopt, {{"experiment", "fig6-policy"},
                       {"seed", "1234"},
                       {"threads", "3"},
                       {"format", "json"},
                       {"params.beta", "0.045"},
                       {"entry_mode", "fixed(0.25)"},
                       {"p_crisis", "0.11"}});
    const auto file = write_file(dir, "resolved.conf", serialize_config(original));
    const RunConfig reparsed = parse_config(file, {});
    CHECK(reparsed.experiment == original.experiment);
    CHECK(reparsed.seed == original.seed);
    CHECK(reparsed.threads == original.threads);
    CHECK(reparsed.format == original.format);
    CHECK(reparsed.abm.params.beta == original.abm.params.beta);
    CHECK(reparsed.abm.entry_mode == original.abm.entry_mode);
    CHECK(reparsed.abm.h_entry == original.abm.h_entry);
    CHECK(reparsed.abm.p_crisis == original.abm.p_crisis);
    CHECK(serialize_config(reparsed) == serialize_config(original));
}

TEST_CASE("ingest validates rows and reports line numbers") {
    const auto dir = temp_dir("ingest");

    const auto bad_fraction = write_file(
        dir, "adoption.csv", "country,year,fraction\nX,2010,0.5\nX,2012,1.5\n");
    CHECK_THROWS_WITH_AS(ingest_adoption(bad_fraction), doctest::Contains(":3:"),
                         std::runtime_error);

    const auto duplicate = write_file(
        dir, "pisa.csv", "country,year,score\nX,2010,500\nX,2010,501\n");
    CHECK_THROWS_WITH_AS(ingest_pisa(duplicate), doctest::Contains("duplicate"),
                         std::runtime_error);

    const auto bad_header =
        write_file(dir, "deskill.csv", "domain,decline\nx,0.2\n");
    CHECK_THROWS_WITH_AS(ingest_deskill(bad_header), doctest::Contains("header"),
                         std::runtime_error);

    const auto bad_domain = write_file(
        dir, "benchmarks.csv",
        "model,release_date,domain,ai_score,human_baseline\nM,2024-01,Chess,0.9,0.9\n");
    CHECK_THROWS_WITH_AS(ingest_benchmarks(bad_domain),
                         doctest::Contains("unknown domain"), std::runtime_error);
}

TEST_CASE("bundled data files ingest cleanly") {
    const auto pisa = ingest_pisa("data/pisa.csv");
    CHECK(pisa.size() == 109); // 102 panel points + 7 OECD rows

    const auto series = load_oecd_series("data/pisa.csv");
    REQUIRE(series.years.size() == 7);
    CHECK(series.years.front() == 2003);
    CHECK(series.scores.front() == 500);
    CHECK(series.scores[5] == 489); // 2018
    CHECK(series.scores.back() == 472);

    const auto panel = load_panel("data/pisa.csv", "data/adoption.csv");
    CHECK(panel.observations.size() == 102);
    CHECK(panel.countries().size() == 15);

    const auto deskill = ingest_deskill("data/deskill.csv");
    CHECK(deskill.size() == 4);
    CHECK(deskill[0].decline == 0.17);

    const auto benchmarks = ingest_benchmarks("data/benchmarks.csv");
    CHECK(benchmarks.size() == 20);
}

TEST_CASE("bundled OECD series fits within the documented quality bounds") {
    const auto series = load_oecd_series("data/pisa.csv");
    const auto ode_fit =
        estimation::fit_ode_single(series, estimation::oecd_default_driver());
    CHECK(ode_fit.r_squared >= 0.85);
    CHECK(ode_fit.rmse <= 4.0); // score points

    std::vector<double> t, y;
    for (std::size_t i = 0; i < series.years.size(); ++i) {
        t.push_back(series.years[i] - series.years.front());
        y.push_back(series.scores[i]);
    }
    const auto linear = estimation::fit_alt_model(estimation::ModelKind::linear, t, y);
    const auto logistic =
        estimation::fit_alt_model(estimation::ModelKind::logistic, t, y);
    const double delta_linear = linear.aic - ode_fit.aic;
    CHECK(delta_linear >= 2.0);
    CHECK(delta_linear <= 7.0);
    CHECK(linear.r_squared >= 0.75);
    CHECK(linear.r_squared <= 0.88);
    // With the fixed mid-range midpoint the logistic collapses to the
    // quasi-linear regime, so it only has to lose to the capability model.
    CHECK(logistic.aic > ode_fit.aic);
}

TEST_CASE("bundled panel gives the exponential model 16 parameters") {
    const auto panel = load_panel("data/pisa.csv", "data/adoption.csv");
    const auto fit = estimation::fit_alt_model_panel(
        estimation::ModelKind::exponential, panel);
    CHECK(fit.n_params == 16);
    const auto country_linear = estimation::fit_alt_model_panel(
        estimation::ModelKind::country_linear, panel);
    CHECK(country_linear.n_params == 30);
}

TEST_CASE("CSV and JSON emissions carry numerically identical values") {
    const auto dir = temp_dir("formats");
    Table table("numbers", {"label", "value"});
    table.add_row({"pi-ish", 3.14159265358979});
    table.add_row({"tiny", 1.25e-9});
    table.add_row({"negative", -42.5});
    write_table(table, dir, OutputFormat::csv);
    write_table(table, dir, OutputFormat::json);

    const std::string csv = read_file(dir / "numbers.csv");
    const std::string json = read_file(dir / "numbers.json");
    for (const std::string token : {"3.141592654", "1.25e-09", "-42.5"}) {
        CHECK(csv.find(token) != std::string::npos);
        CHECK(json.find(token) != std::string::npos);
    }
    // RFC 4180 line endings in the CSV.
    CHECK(csv.find("\r\n") != std::string::npos);
}

TEST_CASE("unknown preset names are rejected with the valid list") {
    RunConfig config;
    config.experiment = "fig9-nonexistent";
    CHECK_THROWS_WITH_AS(compute_experiment(config),
                         doctest::Contains("fig6-policy"), std::invalid_argument);
}

TEST_CASE("experiment registry lists the documented presets") {
    const auto names = experiment_names();
    CHECK(names.size() == 12);
    for (const std::string expected :
         {"fig1-calibration", "fig4-threshold", "tab1-kbar", "sensitivity-suite"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
}

TEST_CASE("fig6 preset emits the documented policy table shape") {
    const auto dir = temp_dir("fig6");
    RunConfig config = parse_config(
        std::nullopt,
        {{"experiment", "fig6-policy"}, {"replicates", "4"}, {"t_steps", "50"}});
    config.output_dir = dir;
    const auto manifest = run_experiment(config);
    REQUIRE_FALSE(manifest.files.empty());
    CHECK(manifest.files[0].name == "policy.csv");
    CHECK(manifest.files[0].rows == 5);

    const std::string csv = read_file(dir / "policy.csv");
    CHECK(csv.rfind("practice_fraction,median_h,iqr_lo,iqr_hi\r\n", 0) == 0);
    // Manifest row counts match the emitted tables.
    const std::string manifest_json = read_file(dir / "manifest.json");
    CHECK(manifest_json.find("\"rows\": 5") != std::string::npos);
    CHECK(manifest_json.find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("rerunning a preset with the same seed is byte-identical") {
    const auto dir_a = temp_dir("rerun_a");
    const auto dir_b = temp_dir("rerun_b");
    for (int threads : {1, 3}) {
        RunConfig config = parse_config(
            std::nullopt, {{"experiment", "fig6-policy"},
                           {"replicates", "4"},
                           {"t_steps", "50"},
                           {"threads", std::to_string(threads)}});
        config.output_dir = threads == 1 ? dir_a : dir_b;
        run_experiment(config);
    }
    CHECK(read_file(dir_a / "policy.csv") == read_file(dir_b / "policy.csv"));
    CHECK(read_file(dir_a / "policy_improvement.csv") ==
          read_file(dir_b / "policy_improvement.csv"));
}

TEST_CASE("every emitted file lands inside the output directory") {
    const auto dir = temp_dir("containment");
    RunConfig config = parse_config(
        std::nullopt,
        {{"experiment", "si-s2-epsilon"}, {"replicates", "2"}});
    config.output_dir = dir;
    const auto manifest = run_experiment(config);
    for (const auto& file : manifest.files) {
        CHECK(fs::exists(dir / file.name));
        CHECK(file.rows > 0);
    }
}

TEST_CASE("empty tables are rejected at emission") {
    Table table("empty", {"a"});
    CHECK_THROWS_AS(write_table(table, fs::temp_directory_path(), OutputFormat::csv),
                    std::invalid_argument);
}

TEST_CASE("axis keys validate against the numeric key table") {
    abm::AbmConfig cfg;
    apply_abm_axis(cfg, "params.k_ai", 0.8);
    CHECK(cfg.params.k_ai == 0.8);
    CHECK_THROWS_AS(apply_abm_axis(cfg, "params.k_ai", 1.5), std::invalid_argument);
    CHECK_THROWS_AS(apply_abm_axis(cfg, "n_agents", 50.0), std::invalid_argument);
}
