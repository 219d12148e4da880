#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plugcast/artifact.hpp"
#include "plugcast/csv.hpp"
#include "plugcast/error.hpp"
#include "plugcast/pipeline.hpp"
#include "plugcast/rng.hpp"
#include "support.hpp"

using namespace plugcast;
using namespace plugcast::test;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Two months of synthetic data and very short training.
json small_config(const fs::path& out) {
    return {{"paths", {{"output_dir", out.string()}}},
            {"synth", {{"span_start", "2017-01-01"}, {"span_end", "2017-03-01"}, {"seed", 3}}},
            {"train", {{"epochs", 3}}}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    CsvReader reader(in);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> f;
    while (reader.next(f)) rows.push_back(f);
    return rows;
}

void run(std::string_view cmd, const json& doc) { run_command(cmd, parse_run_config(doc)); }

std::optional<Errc> config_error(const json& doc, const json& overrides = json::object()) {
    return errc_of([&] { (void)parse_run_config(doc, overrides); });
}

}  // namespace

TEST_CASE("config defaults and seed derivation") {
    const auto d = parse_run_config(json::object());
    CHECK(d.output_dir == "out");
    CHECK(d.split_seed == 7);
    CHECK(d.synth.seed == kDefaultSynthSeed);
    CHECK(d.train_seed("nn-v1") == 102);
    CHECK(d.train.epochs == 1000);
    CHECK(d.models.size() == 5);
    CHECK(d.exclusions.drop_first == std::chrono::minutes{7 * 1440});
    CHECK(d.exclusions.holiday_dates.empty());

    const auto m = parse_run_config({{"seed", 5}, {"split", {{"seed", 11}}}});
    CHECK(m.split_seed == 11);  // explicit seeds win over the master seed
    CHECK(m.synth.seed == derive_seed(5, 1));
    CHECK(m.train_seed("nn-v3") == derive_seed(5, 104));

    const auto o = parse_run_config({{"split", {{"seed", 11}}}}, {{"seed", 9}, {"out", "elsewhere"}, {"epochs", 4}});
    CHECK(o.split_seed == derive_seed(9, 2));  // --seed replaces every seed
    CHECK(o.output_dir == "elsewhere");
    CHECK(o.train.epochs == 4);

    const auto h = parse_run_config({{"exclusions", {{"holidays", {"2017-04-14", "2017-12-25"}}}}});
    CHECK(h.exclusions.holiday_dates.size() == 2);
}

TEST_CASE("invalid config values are validation errors") {
    CHECK(config_error({{"models", {"persistence", "arima"}}}) == Errc::config);
    CHECK(config_error({{"models", json::array()}}) == Errc::config);
    CHECK(config_error({{"features", {{"lags", {48, 48}}}}}) == Errc::config);
    CHECK(config_error({{"features", {{"lags", {48, 96}}}}}) == Errc::config);  // persistence needs 144, 336
    CHECK(config_error({{"features", {{"lags", {48, 96}}}}, {"models", {"glm"}}}) == std::nullopt);
    CHECK(config_error({{"split", {{"train", 0.9}}}}) == Errc::config);
    CHECK(config_error({{"window", {{"start", "2017-01-01"}}}}) == Errc::config);
    CHECK(config_error({{"window", {{"start", "2017-01-05"}, {"end", "2017-01-01"}}}}) == Errc::config);
    CHECK(config_error({{"exclusions", {{"drop_first_days", -1}}}}) == Errc::config);
    CHECK(config_error({{"exclusions", {{"holidays", {"14/04/2017"}}}}}) == Errc::config);
    CHECK(config_error({{"columns", {{"date_format", "DD/MM"}}}}) == Errc::config);
    CHECK(config_error({{"train", {{"dropout_rate", 1.5}}}}) == Errc::config);
    CHECK(config_error({{"train", {{"epochs", "many"}}}}) == Errc::config);
    CHECK(config_error({{"synth", {{"dow_intensity", {1, 1, 1, 1, 1, 1, -1}}}}}) == Errc::config);
    CHECK(config_error({{"paths", "out"}}) == Errc::config);
    CHECK(config_error(json::array()) == Errc::config);
    CHECK(config_error(json::object(), {{"epochs", -2}}) == Errc::config);

    try {
        (void)parse_run_config({{"models", {"arima"}}});
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("arima") != std::string::npos);
    }
}

TEST_CASE("synth writes a header-only csv for zero intensity") {
    TempDir dir;
    auto doc = small_config(dir.path());
    doc["synth"]["dow_intensity"] = {0, 0, 0, 0, 0, 0, 0};
    run("synth", doc);
    CHECK(read_file(dir / "events.csv") ==
          "event_id,charge_point_id,connector,start_date,start_time,end_date,end_time,energy,organization\n");
}

TEST_CASE("synth and build are reproducible") {
    TempDir dir;
    const auto doc = small_config(dir.path());
    run("synth", doc);
    const auto events = read_file(dir / "events.csv");
    const auto provenance = json::parse(read_file(dir / "synth_provenance.json"));
    CHECK(provenance.at("seed") == 3);
    CHECK(provenance.at("config_hash").get<std::string>().size() == 16);
    run("synth", doc);
    CHECK(read_file(dir / "events.csv") == events);

    run("build", doc);
    const auto series = read_file(dir / "series.csv");
    const auto report = json::parse(read_file(dir / "ingest_report.json"));
    CHECK(report.at("steps") == 59 * 48);
    CHECK(report.at("malformed") == 0);
    CHECK(report.at("accepted") == provenance.at("events"));
    CHECK(report.at("unmasked_steps") == (59 - 21) * 48);
    run("build", doc);
    CHECK(read_file(dir / "series.csv") == series);
}

TEST_CASE("build of a single 90-minute event") {
    TempDir dir;
    const std::string header =
        "event_id,charge_point_id,connector,start_date,start_time,end_date,end_time,energy,organization\n";
    json doc = {{"paths", {{"output_dir", dir.path().string()}}},
                {"exclusions", {{"drop_first_days", 0}, {"drop_last_days", 0}}}};

    // On the half-hour grid: three full blocks.
    write_file(dir / "events.csv", header + "a,cp,1,2017-03-01,09:00,2017-03-01,10:30,1,o\n");
    run("build", doc);
    auto rows = read_csv(dir / "series.csv");
    REQUIRE(rows.size() == 1 + 48);
    std::vector<std::string> occupied;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i][1] != "0") occupied.push_back(rows[i][0] + "=" + rows[i][1]);
    CHECK(occupied == std::vector<std::string>{"2017-03-01T09:00=1", "2017-03-01T09:30=1", "2017-03-01T10:00=1"});

    // Straddling the grid: the partly covered end blocks have minimum 0.
    write_file(dir / "events.csv", header + "a,cp,1,2017-03-01,09:10,2017-03-01,10:40,1,o\n");
    run("build", doc);
    rows = read_csv(dir / "series.csv");
    occupied.clear();
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i][1] != "0") occupied.push_back(rows[i][0] + "=" + rows[i][1]);
    CHECK(occupied == std::vector<std::string>{"2017-03-01T09:30=1", "2017-03-01T10:00=1"});
}

TEST_CASE("analyze outputs") {
    TempDir dir;
    auto doc = small_config(dir.path());
    doc["paths"]["exogenous_csv"] = (dir / "weather.csv").string();
    run("synth", doc);
    run("build", doc);
    run("analyze", doc);  // exogenous file absent: section omitted
    CHECK(read_csv(dir / "lag_correlation.csv").size() == 1 + 7);
    CHECK_FALSE(fs::exists(dir / "exogenous_correlation.csv"));
    auto analysis = json::parse(read_file(dir / "analysis.json"));
    CHECK_FALSE(analysis.contains("exogenous"));
    CHECK(analysis.at("adf").at("stationary_at_5pct").is_boolean());
    CHECK(read_csv(dir / "grouped_hour.csv").size() == 1 + 24);
    CHECK(read_csv(dir / "grouped_dow.csv").size() == 1 + 7);
    CHECK(read_csv(dir / "grouped_month.csv").size() == 1 + 2);

    std::ostringstream weather;
    weather << "timestamp,value\n";
    for (int h = 0; h < 59 * 24; ++h)
        weather << format_iso(make_timestamp(2017, 1, 1) + std::chrono::hours{h}) << ',' << (h % 24) << '\n';
    write_file(dir / "weather.csv", weather.str());
    run("analyze", doc);
    const auto exo = read_csv(dir / "exogenous_correlation.csv");
    REQUIRE(exo.size() == 2);
    CHECK(exo[0] == std::vector<std::string>{"pearson", "spearman", "n"});
    analysis = json::parse(read_file(dir / "analysis.json"));
    CHECK(analysis.at("exogenous").at("n").get<int>() > 1000);
}

TEST_CASE("analyze of a periodic series gives unit day-before correlations") {
    TempDir dir;
    Rng rng(1);
    std::vector<std::int64_t> day(48);
    for (auto& v : day) v = static_cast<std::int64_t>(rng.below(30));
    std::vector<std::int64_t> values;
    for (int d = 0; d < 60; ++d) values.insert(values.end(), day.begin(), day.end());
    auto s = make_series(make_timestamp(2017, 1, 2), values);
    std::ostringstream out;
    write_series_csv(out, s);
    write_file(dir / "series.csv", out.str());
    run("analyze", {{"paths", {{"output_dir", dir.path().string()}}}});
    const auto rows = read_csv(dir / "lag_correlation.csv");
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == std::vector<std::string>{"day", "pearson", "spearman", "pairs"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] == "1");
        CHECK(rows[i][2] == "1");
    }
}

TEST_CASE("train and evaluate") {
    TempDir dir;
    auto doc = small_config(dir.path());
    doc["evaluate"] = {{"plot", true}};
    for (const char* cmd : {"synth", "build", "train"}) run(cmd, doc);
    for (const auto& name : known_models()) CHECK(fs::exists(dir / ("models/" + name + ".json")));
    for (const char* name : {"nn-v1", "nn-v2", "nn-v3"})
        CHECK(read_csv(dir / (std::string("models/") + name + "_history.csv")).size() == 1 + 3);
    std::vector<std::string> first;
    for (const auto& name : known_models()) first.push_back(read_file(dir / ("models/" + name + ".json")));
    run("train", doc);
    for (std::size_t i = 0; i < first.size(); ++i)
        CHECK(read_file(dir / ("models/" + known_models()[i] + ".json")) == first[i]);

    const auto artifact = artifact_from_json(json::parse(first[4]));
    CHECK(artifact.name == "nn-v3");
    CHECK(artifact.train_config->epochs == 3);

    run("evaluate", doc);
    const auto metrics = read_csv(dir / "metrics.csv");
    REQUIRE(metrics.size() == 1 + 15);
    CHECK(metrics[0] == std::vector<std::string>{"model", "split", "rmse", "mape_pct", "mae", "n", "n_skipped_zero_actual"});
    const auto report = json::parse(read_file(dir / "report.json"));
    REQUIRE(report.at("metrics").size() == 15);
    for (std::size_t i = 0; i < 15; ++i) {
        const auto& row = metrics[i + 1];
        const auto& m = report.at("metrics")[i];
        CHECK(row[0] == m.at("model").get<std::string>());
        CHECK(row[1] == m.at("split").get<std::string>());
        CHECK(std::stod(row[2]) == m.at("rmse").get<double>());
        CHECK(std::stod(row[4]) == m.at("mae").get<double>());
        CHECK(std::stoul(row[5]) == m.at("n").get<std::size_t>());
    }
    const auto stats = read_csv(dir / "residual_stats.csv");
    REQUIRE(stats.size() == 1 + 5);
    CHECK(stats[0] == std::vector<std::string>{"model", "mean", "median", "std_dev", "range", "iqr"});
    CHECK(fs::exists(dir / "plots/plugin_by_hour.csv"));
    CHECK(fs::exists(dir / "plots/test_residuals_by_day.csv"));

    const auto report_text = read_file(dir / "report.json");
    run("evaluate", doc);
    CHECK(read_file(dir / "report.json") == report_text);
}

TEST_CASE("pipeline errors") {
    TempDir dir;
    auto doc = small_config(dir.path());
    CHECK(errc_of([&] { run("evaluate", doc); }) == Errc::io);  // no series yet
    CHECK(errc_of([&] { run("build", doc); }) == Errc::io);     // no events yet
    CHECK(errc_of([&] { run("fly", doc); }) == Errc::config);

    doc["synth"]["span_end"] = "2017-01-20";
    run("synth", doc);
    run("build", doc);
    try {
        run("train", doc);
        FAIL("expected an error");
    } catch (const Error& e) {
        // 19 days minus 21 excluded days leave nothing to model.
        CHECK((e.code() == Errc::insufficient_history || e.code() == Errc::too_few_rows));
        CHECK(std::string(e.what()).find("Remedy") != std::string::npos);
    }

    doc = small_config(dir.path());
    run("synth", doc);
    run("build", doc);
    CHECK(errc_of([&] { run("evaluate", doc); }) == Errc::missing_artifact);
}

TEST_CASE("fnv1a") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
